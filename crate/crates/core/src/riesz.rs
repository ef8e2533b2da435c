//! The Riesz-basis criterion for `{ψ_n}_{n∉Θ}` and the constructions behind
//! it: the matrix `M_Θ` of boundary coordinates, the map `y ↦ y_Θ`, the
//! transferred inner product, the completeness defect of a singular `M_Θ`,
//! and finite Gram sections as frame-bound estimates.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{h_inner, HVector, Problem};
use crate::reduced::{self, CrossCheck};
use crate::spectrum::{EigenPair, Spectrum};

/// `N` distinct eigenvalue indices to remove, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ThetaSet {
    indices: Vec<usize>,
}

impl ThetaSet {
    /// `n` is the problem's boundary dimension `N`.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.len() != n {
            return Err(Error::InvalidTheta(format!(
                "expected {n} indices, got {}",
                indices.len()
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTheta(format!(
                "indices must be strictly increasing, got {indices:?}"
            )));
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self { indices: Vec::new() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, n: usize) -> bool {
        self.indices.binary_search(&n).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Basis,
    NotBasis,
    Borderline,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Basis => "basis",
            Verdict::NotBasis => "not_basis",
            Verdict::Borderline => "borderline",
        }
    }
}

/// Relative thresholds on `σ_min / scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictThresholds {
    /// Above this: invertible.
    pub basis: f64,
    /// Below this: singular. In between: borderline.
    pub singular: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        Self { basis: 1e-6, singular: 1e-10 }
    }
}

fn check_theta(sp: &Spectrum, theta: &ThetaSet) -> Result<()> {
    if theta.len() != sp.n_boundary() {
        return Err(Error::InvalidTheta(format!(
            "problem has N = {}, index set has {} entries",
            sp.n_boundary(),
            theta.len()
        )));
    }
    match theta.indices().iter().find(|&&n| n >= sp.len()) {
        Some(&n) => Err(Error::MissingIndex(n)),
        None => Ok(()),
    }
}

/// `M_Θ`: row `k` is `ψ̂_{n_k}`.
pub fn build_m(sp: &Spectrum, theta: &ThetaSet) -> Result<DMatrix<f64>> {
    check_theta(sp, theta)?;
    let n = theta.len();
    Ok(DMatrix::from_fn(n, n, |k, j| sp.pairs[theta.indices()[k]].psi_hat[j]))
}

/// Singular values, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    sv
}

/// Largest Euclidean row norm; the reference scale for the verdict.
pub fn row_scale(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.norm()).fold(0.0, f64::max)
}

pub fn verdict_with(m: &DMatrix<f64>, scale: f64, thresholds: &VerdictThresholds) -> Verdict {
    let Some(&sigma_min) = singular_values(m).last() else {
        return Verdict::Basis;
    };
    if sigma_min > thresholds.basis * scale {
        Verdict::Basis
    } else if sigma_min < thresholds.singular * scale {
        Verdict::NotBasis
    } else {
        Verdict::Borderline
    }
}

/// Invertibility verdict for `M_Θ` with the default thresholds.
pub fn verdict(m: &DMatrix<f64>, scale: f64) -> Verdict {
    verdict_with(m, scale, &VerdictThresholds::default())
}

/// `M_Θ` together with its inverse, for the `y ↦ y_Θ` construction.
#[derive(Debug, Clone)]
pub struct ThetaMap<'a> {
    sp: &'a Spectrum,
    theta: ThetaSet,
    m_inv: DMatrix<f64>,
    sigma_min: f64,
}

impl<'a> ThetaMap<'a> {
    /// Fails unless the verdict for `M_Θ` is `basis`.
    pub fn new(sp: &'a Spectrum, theta: &ThetaSet) -> Result<Self> {
        let m = build_m(sp, theta)?;
        let v = verdict(&m, row_scale(&m));
        if v != Verdict::Basis {
            return Err(Error::SingularMatrix(v.as_str().into()));
        }
        let sigma_min = singular_values(&m).last().copied().unwrap_or(f64::INFINITY);
        let m_inv = m.try_inverse().ok_or_else(|| Error::SingularMatrix("basis".into()))?;
        Ok(Self { sp, theta: theta.clone(), m_inv, sigma_min })
    }

    fn removed(&self) -> impl Iterator<Item = &EigenPair> {
        self.theta.indices().iter().map(|&n| &self.sp.pairs[n])
    }

    /// `y_Θ = −W⁻¹ M_Θ⁻¹ (∫ y ψ_{n_k})_k`.
    pub fn y_theta(&self, y: &[f64]) -> Result<Vec<f64>> {
        let column = self
            .removed()
            .map(|pair| self.sp.l2_inner(y, &pair.values()))
            .collect::<Result<Vec<_>>>()?;
        let solved = &self.m_inv * DVector::from_vec(column);
        Ok(solved
            .iter()
            .zip(self.sp.weight().diagonal())
            .map(|(x, w)| -x / w)
            .collect())
    }

    /// `⟨y, z⟩_Θ = ⟨(y, y_Θ), (z, z_Θ)⟩` in the linearized space.
    pub fn theta_inner(&self, y: &[f64], z: &[f64]) -> Result<f64> {
        let (yt, zt) = (self.y_theta(y)?, self.y_theta(z)?);
        h_inner(HVector::new(y, &yt), HVector::new(z, &zt), self.sp.weight(), self.sp.step())
    }

    /// `1 + ‖W⁻¹‖·‖M_Θ⁻¹‖²·Σ_k ∫ψ_{n_k}²`, the upper equivalence constant.
    pub fn equivalence_constant(&self) -> Result<f64> {
        let w_inv = self.sp.weight().diagonal().iter().map(|w| 1.0 / w).fold(0.0, f64::max);
        let mut mass = 0.0;
        for pair in self.removed() {
            let v = pair.values();
            mass += self.sp.l2_inner(&v, &v)?;
        }
        Ok(1.0 + w_inv * mass / (self.sigma_min * self.sigma_min))
    }
}

pub fn y_theta(sp: &Spectrum, theta: &ThetaSet, y: &[f64]) -> Result<Vec<f64>> {
    ThetaMap::new(sp, theta)?.y_theta(y)
}

pub fn theta_inner(sp: &Spectrum, theta: &ThetaSet, y: &[f64], z: &[f64]) -> Result<f64> {
    ThetaMap::new(sp, theta)?.theta_inner(y, z)
}

/// A nonzero function orthogonal to every retained eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessDefect {
    /// Coefficients with `Σ α_k ψ̂_{n_k} = 0`, unit Euclidean norm.
    pub alpha: Vec<f64>,
    /// `y = Σ α_k ψ_{n_k}` on the spectrum grid.
    pub function: Vec<f64>,
    pub l2_norm: f64,
    /// `(n, ⟨y, ψ_n⟩)` for retained `n ≤ n_test`.
    pub residuals: Vec<(usize, f64)>,
}

pub fn completeness_defect(sp: &Spectrum, theta: &ThetaSet, n_test: usize) -> Result<CompletenessDefect> {
    let m = build_m(sp, theta)?;
    let scale = row_scale(&m);
    let threshold = VerdictThresholds::default().singular * scale;
    if m.is_empty() {
        return Err(Error::NullVectorNotFound { sigma_min: f64::INFINITY, threshold });
    }
    if n_test >= sp.len() {
        return Err(Error::InsufficientSpectrum { needed: n_test + 1, available: sp.len() });
    }
    // Null vector of the matrix whose columns are ψ̂_{n_k}, i.e. of M_Θᵀ.
    let svd = m.transpose().svd(false, true);
    let (k_min, &sigma_min) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite"))
        .expect("nonempty");
    if sigma_min >= threshold {
        return Err(Error::NullVectorNotFound { sigma_min, threshold });
    }
    let v_t = svd.v_t.expect("requested");
    let alpha: Vec<f64> = v_t.row(k_min).iter().copied().collect();

    let mut function = vec![0.0; sp.grid().len()];
    for (a, &n) in alpha.iter().zip(theta.indices()) {
        for (out, st) in function.iter_mut().zip(&sp.pairs[n].psi.states) {
            *out += a * st.u;
        }
    }
    let l2_norm = sp.l2_inner(&function, &function)?.sqrt();
    if l2_norm.is_nan() || l2_norm <= 0.0 {
        return Err(Error::ZeroNorm(f64::NAN));
    }
    let residuals = (0..=n_test)
        .filter(|n| !theta.contains(*n))
        .map(|n| Ok((n, sp.l2_inner(&function, &sp.pairs[n].values())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CompletenessDefect { alpha, function, l2_norm, residuals })
}

/// Extreme eigenvalues of one finite Gram section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramSection {
    pub size: usize,
    pub min_eig: f64,
    pub max_eig: f64,
}

/// Gram sections of the first `size` retained eigenfunctions, for each size.
pub fn gram_section(sp: &Spectrum, theta: &ThetaSet, sizes: &[usize]) -> Result<Vec<GramSection>> {
    let retained: Vec<&EigenPair> = sp.pairs.iter().filter(|p| !theta.contains(p.n)).collect();
    let largest = sizes.iter().copied().max().unwrap_or(0);
    if largest > retained.len() {
        return Err(Error::InsufficientSpectrum { needed: largest, available: retained.len() });
    }
    let values: Vec<Vec<f64>> = retained[..largest].iter().map(|p| p.values()).collect();
    let mut gram = DMatrix::zeros(largest, largest);
    for i in 0..largest {
        for j in 0..=i {
            let g = sp.l2_inner(&values[i], &values[j])?;
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
    }
    Ok(sizes
        .iter()
        .map(|&size| {
            if size == 0 {
                return GramSection { size, min_eig: f64::NAN, max_eig: f64::NAN };
            }
            let section = gram.view((0, 0), (size, size)).into_owned();
            let eig = SymmetricEigen::new(section).eigenvalues;
            GramSection { size, min_eig: eig.min(), max_eig: eig.max() }
        })
        .collect())
}

/// Qualitative behaviour of the smallest Gram eigenvalue as sections grow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GramTrend {
    /// Within 20% of its first value throughout.
    Bounded,
    /// Strictly decreasing and below 80% of its first value at the end.
    Decaying,
    Inconclusive,
}

pub fn gram_trend(sections: &[GramSection]) -> GramTrend {
    let mut sorted = sections.to_vec();
    sorted.sort_by_key(|s| s.size);
    let mins: Vec<f64> = sorted.iter().map(|s| s.min_eig).collect();
    let (Some(&first), Some(&last)) = (mins.first(), mins.last()) else {
        return GramTrend::Inconclusive;
    };
    if mins.len() < 2 || first.is_nan() || first <= 0.0 {
        return GramTrend::Inconclusive;
    }
    if mins.iter().all(|m| (m - first).abs() < 0.2 * first) {
        GramTrend::Bounded
    } else if mins.windows(2).all(|w| w[1] < w[0]) && last < 0.8 * first {
        GramTrend::Decaying
    } else {
        GramTrend::Inconclusive
    }
}

/// Agreement of the authoritative verdict with the independent checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Consistency {
    /// Comparison with the closed-form reduced matrix, when a reduction applies.
    pub reduced: Option<CrossCheck>,
    pub gram_trend: GramTrend,
    /// `None` when either side is borderline or inconclusive.
    pub gram_agrees: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszReport {
    pub theta: ThetaSet,
    pub det: f64,
    pub singular_values: Vec<f64>,
    pub scale: f64,
    pub verdict: Verdict,
    pub gram: Vec<GramSection>,
    pub consistency: Consistency,
}

/// Full check of one index set: `M_Θ`, its verdict, Gram sections and the
/// reduced-matrix comparison.
pub fn basis_check(
    p: &Problem,
    sp: &Spectrum,
    theta: &ThetaSet,
    sizes: &[usize],
    thresholds: &VerdictThresholds,
) -> Result<RieszReport> {
    let m = build_m(sp, theta)?;
    let scale = row_scale(&m);
    let verdict = verdict_with(&m, scale, thresholds);
    let gram = gram_section(sp, theta, sizes)?;
    let trend = gram_trend(&gram);
    let gram_agrees = match (verdict, trend) {
        (Verdict::Borderline, _) | (_, GramTrend::Inconclusive) => None,
        (Verdict::Basis, t) => Some(t == GramTrend::Bounded),
        (Verdict::NotBasis, t) => Some(t == GramTrend::Decaying),
    };
    let reduced = reduced::cross_validate(p, sp, theta, thresholds).ok();
    Ok(RieszReport {
        theta: theta.clone(),
        det: m.determinant(),
        singular_values: singular_values(&m),
        scale,
        verdict,
        gram,
        consistency: Consistency { reduced, gram_trend: trend, gram_agrees },
    })
}
