//! Closed-form reductions of `M_Θ` in two special cases, used as independent
//! verdict oracles.
//!
//! * One-sided dependence (one boundary coefficient constant): after removing
//!   nonzero row and column factors, `M_Θ` becomes the matrix of the
//!   polynomials `p_1, …, p_d` (and `p` when the slope is positive)
//!   evaluated at the selected eigenvalues. Its columns are independent
//!   because no nonzero combination of degree at most `d` can vanish at
//!   `d + 1` points while also respecting `p_m(h_k) = 0` for `m ≠ k`.
//! * Linear dependence on both sides (`1 ≤ ind ≤ 2`): `M_Θ` reduces to
//!   `[[1, 1/β_{n_1}], [1, 1/β_{n_2}]]`, invertible iff `β_{n_1} ≠ β_{n_2}`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rational::{Polynomial, RationalHerglotz};
use crate::riesz::{self, ThetaSet, Verdict, VerdictThresholds};
use crate::spectrum::Spectrum;

/// Relative tolerance for declaring two link constants equal.
pub const BETA_EQUALITY_TOL: f64 = 1e-8;

/// `p = Π(h_k − λ)` and the leave-one-out products `p_m`.
pub fn poly_p(f: &RationalHerglotz) -> (Polynomial, Vec<Polynomial>) {
    let leave_one_out = (0..f.poles().len()).map(|m| f.pole_product_without(m)).collect();
    (f.pole_product(), leave_one_out)
}

/// Row of reduced one-sided entries at `λ`: `p_1(λ) … p_d(λ) [p(λ)]`.
fn polynomial_row(f: &RationalHerglotz, lambda: f64) -> Vec<f64> {
    let (p, parts) = poly_p(f);
    let mut row: Vec<f64> = parts.iter().map(|q| q.eval(lambda)).collect();
    if f.h0() > 0.0 {
        row.push(p.eval(lambda));
    }
    row
}

/// Which side carries the eigenparameter in the one-sided case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOneSided {
    pub side: Side,
    pub matrix: DMatrix<f64>,
}

fn one_sided_function(p: &Problem) -> Result<(Side, &RationalHerglotz)> {
    match (p.f().is_constant(), p.big_f().is_constant()) {
        (false, true) => Ok((Side::Left, p.f())),
        (true, false) => Ok((Side::Right, p.big_f())),
        (true, true) => Err(Error::Hypothesis(
            "neither boundary coefficient depends on the eigenparameter (N = 0)".into(),
        )),
        (false, false) => Err(Error::Hypothesis(
            "one-sided reduction needs one constant boundary coefficient".into(),
        )),
    }
}

/// The polynomial matrix at the selected eigenvalues.
pub fn reduced_one_sided(p: &Problem, sp: &Spectrum, theta: &ThetaSet) -> Result<ReducedOneSided> {
    let (side, f) = one_sided_function(p)?;
    let lambdas = selected_eigenvalues(sp, theta)?;
    let rows: Vec<Vec<f64>> = lambdas.iter().map(|&l| polynomial_row(f, l)).collect();
    let n = rows.len();
    Ok(ReducedOneSided { side, matrix: DMatrix::from_fn(n, n, |i, j| rows[i][j]) })
}

/// True when `Σ α_m p_m + α p` vanishing at the given (distinct) points forces
/// all coefficients to zero, i.e. the evaluation matrix has full column rank.
pub fn polynomial_columns_independent(f: &RationalHerglotz, lambdas: &[f64]) -> bool {
    let rows: Vec<Vec<f64>> = lambdas.iter().map(|&l| polynomial_row(f, l)).collect();
    let cols = f.capacity();
    if rows.len() < cols {
        return false;
    }
    let m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let sv = riesz::singular_values(&m);
    let scale = riesz::row_scale(&m);
    sv.last().is_none_or(|&s| s > VerdictThresholds::default().basis * scale)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedLinear {
    pub betas: [f64; 2],
    pub matrix: DMatrix<f64>,
}

impl ReducedLinear {
    pub fn betas_equal(&self) -> bool {
        let [a, b] = self.betas;
        (a - b).abs() <= BETA_EQUALITY_TOL * a.abs().max(b.abs())
    }

    pub fn verdict(&self) -> Verdict {
        if self.betas_equal() {
            Verdict::NotBasis
        } else {
            Verdict::Basis
        }
    }
}

fn linear_hypothesis(p: &Problem) -> Result<()> {
    let ok = |ind: usize| (1..=2).contains(&ind);
    if ok(p.f().index()) && ok(p.big_f().index()) {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!(
            "linear reduction needs 1 <= ind f, ind F <= 2, got {} and {}",
            p.f().index(),
            p.big_f().index()
        )))
    }
}

/// `[[1, 1/β_{n_1}], [1, 1/β_{n_2}]]`.
pub fn reduced_linear(p: &Problem, sp: &Spectrum, theta: &ThetaSet) -> Result<ReducedLinear> {
    linear_hypothesis(p)?;
    if theta.len() != 2 {
        return Err(Error::Hypothesis(format!("linear reduction needs |Θ| = 2, got {}", theta.len())));
    }
    selected_eigenvalues(sp, theta)?;
    let [n1, n2] = [theta.indices()[0], theta.indices()[1]];
    let betas = [sp.pairs[n1].beta, sp.pairs[n2].beta];
    let matrix = DMatrix::from_row_slice(2, 2, &[1.0, 1.0 / betas[0], 1.0, 1.0 / betas[1]]);
    Ok(ReducedLinear { betas, matrix })
}

fn selected_eigenvalues(sp: &Spectrum, theta: &ThetaSet) -> Result<Vec<f64>> {
    theta
        .indices()
        .iter()
        .map(|&n| sp.pair(n).map(|pair| pair.lambda).ok_or(Error::MissingIndex(n)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    OneSided,
    Linear,
}

/// Full-matrix verdict versus reduced verdict for one index set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub kind: ReductionKind,
    pub full_sigma_min: f64,
    pub full_verdict: Verdict,
    pub reduced_sigma_min: f64,
    pub reduced_verdict: Verdict,
    pub agree: bool,
    /// Set when either side is borderline; the grid or tolerances need refining.
    pub needs_refinement: bool,
}

/// Which reduction (if any) applies to a problem; one-sided takes precedence.
pub fn applicable_reduction(p: &Problem) -> Option<ReductionKind> {
    if p.n() == 0 {
        None
    } else if one_sided_function(p).is_ok() {
        Some(ReductionKind::OneSided)
    } else if linear_hypothesis(p).is_ok() {
        Some(ReductionKind::Linear)
    } else {
        None
    }
}

pub fn cross_validate(
    p: &Problem,
    sp: &Spectrum,
    theta: &ThetaSet,
    thresholds: &VerdictThresholds,
) -> Result<CrossCheck> {
    let kind = applicable_reduction(p)
        .ok_or_else(|| Error::Hypothesis("no closed-form reduction applies to this problem".into()))?;
    let full = riesz::build_m(sp, theta)?;
    let full_sigma_min = riesz::singular_values(&full).last().copied().unwrap_or(f64::INFINITY);
    let full_verdict = riesz::verdict_with(&full, riesz::row_scale(&full), thresholds);
    let (reduced_sigma_min, reduced_verdict) = match kind {
        ReductionKind::OneSided => {
            let r = reduced_one_sided(p, sp, theta)?;
            let sv = riesz::singular_values(&r.matrix);
            let v = riesz::verdict_with(&r.matrix, riesz::row_scale(&r.matrix), thresholds);
            (sv.last().copied().unwrap_or(f64::INFINITY), v)
        }
        ReductionKind::Linear => {
            let r = reduced_linear(p, sp, theta)?;
            let sv = riesz::singular_values(&r.matrix);
            (sv.last().copied().unwrap_or(f64::INFINITY), r.verdict())
        }
    };
    let needs_refinement =
        full_verdict == Verdict::Borderline || reduced_verdict == Verdict::Borderline;
    Ok(CrossCheck {
        kind,
        full_sigma_min,
        full_verdict,
        reduced_sigma_min,
        reduced_verdict,
        agree: full_verdict == reduced_verdict,
        needs_refinement,
    })
}
