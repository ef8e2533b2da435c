//! Eigenvalues, normalized eigenvectors of the linearized operator, and the
//! link constants `β_n` with `χ_n = β_n·φ_n`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::{h_inner, simpson_product, HVector, Problem, WeightMatrix};
use crate::propagator::{self, ScaledValue, State, Trajectory};

/// Knobs for the eigenvalue search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bisection stops once the bracket is narrower than
    /// `root_rel_tol · max(1, |λ|)`.
    pub root_rel_tol: f64,
    /// Initial scan step in `t = sign(λ)·√|λ|`.
    pub initial_step: f64,
    /// Mesh halvings allowed before a missed-root error.
    pub max_refinements: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { root_rel_tol: 1e-13, initial_step: 0.05, max_refinements: 6 }
    }
}

/// One eigenpair of the linearized operator.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub n: usize,
    pub lambda: f64,
    /// `ψ_n` and its quasi-derivative, normalized so the full vector has unit norm.
    pub psi: Trajectory,
    /// Boundary coordinates `ψ̂_n`, in weight-matrix order.
    pub psi_hat: Vec<f64>,
    pub beta: f64,
}

impl EigenPair {
    pub fn values(&self) -> Vec<f64> {
        self.psi.values()
    }

    pub fn psi_at_zero(&self) -> f64 {
        self.psi.first().u
    }

    pub fn psi_at_pi(&self) -> f64 {
        self.psi.last().u
    }
}

/// The first `n_max + 1` eigenpairs of a problem.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub pairs: Vec<EigenPair>,
    weight: WeightMatrix,
    step: f64,
    grid: Vec<f64>,
    index_f: usize,
    index_big_f: usize,
}

impl Spectrum {
    /// Locates eigenvalues `0..=n_max` and builds every eigenpair.
    pub fn compute(p: &Problem, n_max: usize, opts: &SolverOptions) -> Result<Self> {
        let lambdas = find_eigenvalues(p, n_max, opts)?;
        let pairs = lambdas
            .par_iter()
            .enumerate()
            .map(|(n, &lambda)| normalize(p, lambda, n))
            .collect::<Result<Vec<_>>>()?;
        let grid = pairs[0].psi.grid.clone();
        Ok(Self {
            step: pairs[0].psi.step(),
            pairs,
            weight: p.weight(),
            grid,
            index_f: p.f().index(),
            index_big_f: p.big_f().index(),
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, n: usize) -> Option<&EigenPair> {
        self.pairs.get(n)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }

    pub fn weight(&self) -> &WeightMatrix {
        &self.weight
    }

    /// Number of boundary coordinates.
    pub fn n_boundary(&self) -> usize {
        self.weight.len()
    }

    /// Spacing of the common sample grid.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn index_f(&self) -> usize {
        self.index_f
    }

    pub fn index_big_f(&self) -> usize {
        self.index_big_f
    }

    /// `∫ a·b` on the common grid.
    pub fn l2_inner(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        simpson_product(a, b, self.step)
    }

    /// Inner product of two eigenvectors in the linearized space.
    pub fn h_inner_pairs(&self, a: &EigenPair, b: &EigenPair) -> Result<f64> {
        let (av, bv) = (a.values(), b.values());
        h_inner(
            HVector::new(&av, &a.psi_hat),
            HVector::new(&bv, &b.psi_hat),
            &self.weight,
            self.step,
        )
    }
}

fn to_lambda(t: f64) -> f64 {
    t * t.abs()
}

fn to_t(lambda: f64) -> f64 {
    lambda.signum() * lambda.abs().sqrt()
}

/// Crude magnitude of the problem data; eigenvalues below `−scale²` are not
/// expected and the count check catches any that are.
fn lower_scan_bound(p: &Problem) -> f64 {
    let mut scale = 1.0 + 2.0 * p.potential().max_abs();
    for side in [p.f(), p.big_f()] {
        scale += side.h().abs();
        for pole in side.poles() {
            scale += pole.location.abs().sqrt() + pole.residue.sqrt();
        }
        if side.h0() > 0.0 {
            scale += 1.0 / side.h0();
        }
    }
    -2.0 * scale
}

enum ScanEvent {
    Exact(f64),
    Bracket(f64, f64),
}

struct Scan {
    events: Vec<ScanEvent>,
    suspicious_touch: Option<f64>,
}

fn scan(p: &Problem, t_lo: f64, t_hi: f64, step: f64) -> Scan {
    let start = (t_lo / step).floor() as i64;
    let end = (t_hi / step).ceil() as i64;
    let samples: Vec<(f64, ScaledValue)> = (start..=end)
        .into_par_iter()
        .map(|i| {
            let lambda = to_lambda(i as f64 * step);
            (lambda, propagator::characteristic_scaled(p, lambda))
        })
        .collect();

    let mut events = Vec::new();
    let mut suspicious_touch = None;
    let mut last: Option<(f64, f64)> = None;
    let mut zero_since_last = false;
    for (lambda, w) in &samples {
        let sign = w.signum();
        if sign == 0.0 {
            events.push(ScanEvent::Exact(*lambda));
            zero_since_last = true;
            continue;
        }
        if let Some((prev_lambda, prev_sign)) = last {
            if zero_since_last && prev_sign == sign {
                suspicious_touch = Some(*lambda);
            }
            if !zero_since_last && prev_sign != sign {
                events.push(ScanEvent::Bracket(prev_lambda, *lambda));
            }
        }
        last = Some((*lambda, sign));
        zero_since_last = false;
    }
    for w in samples.windows(3) {
        let (a, b, c) = (w[0].1, w[1].1, w[2].1);
        if a.signum() == b.signum()
            && b.signum() == c.signum()
            && b.signum() != 0.0
            && b.log2_abs() < a.log2_abs().min(c.log2_abs()) - 40.0
        {
            suspicious_touch = Some(w[1].0);
        }
    }
    Scan { events, suspicious_touch }
}

fn bisect(p: &Problem, mut a: f64, mut b: f64, rel_tol: f64) -> f64 {
    let mut sa = propagator::characteristic_scaled(p, a).signum();
    loop {
        let mid = 0.5 * (a + b);
        if b - a <= rel_tol * mid.abs().max(1.0) || mid <= a || mid >= b {
            return mid;
        }
        let sm = propagator::characteristic_scaled(p, mid).signum();
        if sm == 0.0 {
            return mid;
        }
        if sm == sa {
            a = mid;
            sa = sm;
        } else {
            b = mid;
        }
    }
}

/// Allowed disagreement between a root's position and its asymptotic slot.
fn allowed_slot_drift(n: usize) -> i64 {
    if n <= 10 {
        2
    } else {
        0
    }
}

/// `(ind f + ind F)/2`; eigenvalue `n` sits near `(n − this)²` for large `n`.
fn half_index(p: &Problem) -> f64 {
    p.total_index() as f64 / 2.0
}

/// The first `n_max + 1` zeros of the characteristic function, increasing.
pub fn find_eigenvalues(p: &Problem, n_max: usize, opts: &SolverOptions) -> Result<Vec<f64>> {
    let shift = half_index(p);
    let mut t_lo = lower_scan_bound(p);
    let mut t_hi = (n_max as f64 + 2.5 - shift).max(3.0);
    let mut step = opts.initial_step;
    let mut previous_count = None;
    let mut failure = String::from("no scan performed");
    let mut touch = None;

    for _ in 0..=opts.max_refinements {
        let found = scan(p, t_lo, t_hi, step);
        let count = found.events.len();
        let stable = previous_count == Some(count);
        previous_count = Some(count);
        if !stable {
            failure = format!("root count not yet stable at mesh step {step}");
            step /= 2.0;
            continue;
        }
        touch = found.suspicious_touch;
        if touch.is_some() {
            failure = "sign-stable near-zero of the characteristic function".into();
            step /= 2.0;
            previous_count = None;
            continue;
        }
        if count < n_max + 1 {
            failure = format!("found {count} roots, need {}", n_max + 1);
            t_hi += 2.0;
            previous_count = None;
            continue;
        }
        let mut roots: Vec<f64> = found
            .events
            .par_iter()
            .map(|e| match *e {
                ScanEvent::Exact(l) => l,
                ScanEvent::Bracket(a, b) => bisect(p, a, b, opts.root_rel_tol),
            })
            .collect();
        roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));

        let lowest = to_t(roots[0]);
        if lowest < 0.5 * t_lo {
            failure = format!("lowest root at t = {lowest} is close to the scan bound {t_lo}");
            t_lo *= 2.0;
            previous_count = None;
            continue;
        }
        // Strong boundary data or potentials move finitely many low eigenvalues
        // arbitrarily far from their asymptotic slots; only roots beyond the
        // data scale are held to the slot.
        let asymptotic_from = -0.5 * t_lo;
        let drift = roots.iter().enumerate().find(|&(n, &l)| {
            if to_t(l) < asymptotic_from {
                return false;
            }
            let slot = (to_t(l) + shift).round() as i64;
            (slot - n as i64).abs() > allowed_slot_drift(n)
        });
        if let Some((n, &l)) = drift {
            failure = format!(
                "eigenvalue {n} at lambda = {l} does not match its asymptotic slot (sqrt ~ {})",
                n as f64 - shift
            );
            step /= 2.0;
            t_lo *= 2.0;
            previous_count = None;
            continue;
        }
        roots.truncate(n_max + 1);
        return Ok(roots);
    }

    if let Some(at) = touch {
        return Err(Error::DegenerateRoot(at));
    }
    Err(Error::MissedRoots(failure))
}

/// `1/β` from the endpoint state: projection of `(φ(π), φ^[1](π))` onto
/// `(F↓(λ), F↑(λ))`, which never vanish together.
fn inverse_beta_at_endpoint(end: State, target: State) -> f64 {
    (end.u * target.u + end.v * target.v) / (target.u * target.u + target.v * target.v)
}

/// Raw (unnormalized) boundary coordinates for `φ(·, λ)`.
fn raw_boundary_vector(p: &Problem, lambda: f64, end: State) -> Vec<f64> {
    let mut g = Vec::with_capacity(p.n());
    let f = p.f();
    let scale = f.down_scale();
    for (k, pole) in f.poles().iter().enumerate() {
        // δ_k φ(0)/(λ − h_k) with φ(0) = f↓(λ), cancelled.
        g.push(-pole.residue * scale * f.pole_product_without(k).eval(lambda));
    }
    if f.h0() > 0.0 {
        g.push(-f.pole_product().eval(lambda));
    }

    // Right side: φ(π) = F↓(λ)/β.
    let big_f = p.big_f();
    let gamma = inverse_beta_at_endpoint(end, propagator::right_terminal(p, lambda));
    let scale = big_f.down_scale();
    for (k, pole) in big_f.poles().iter().enumerate() {
        g.push(pole.residue * scale * big_f.pole_product_without(k).eval(lambda) * gamma);
    }
    if big_f.h0() > 0.0 {
        g.push(big_f.pole_product().eval(lambda) * gamma);
    }
    g
}

/// Builds the normalized eigenpair for a located eigenvalue.
pub fn normalize(p: &Problem, lambda: f64, n: usize) -> Result<EigenPair> {
    let phi = propagator::solve_left(p, lambda);
    let g = raw_boundary_vector(p, lambda, phi.last());
    let values = phi.values();
    let norm2 = h_inner(HVector::new(&values, &g), HVector::new(&values, &g), &p.weight(), phi.step())?;
    if !(norm2.is_finite() && norm2 > 0.0) {
        return Err(Error::ZeroNorm(lambda));
    }
    let rho = norm2.sqrt();
    let beta = beta_between(&phi, &propagator::solve_right(p, lambda), lambda)?;
    Ok(EigenPair {
        n,
        lambda,
        psi: phi.scaled(1.0 / rho),
        psi_hat: g.iter().map(|x| x / rho).collect(),
        beta,
    })
}

fn beta_between(phi: &Trajectory, chi: &Trajectory, lambda: f64) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    let mut peak = (0, 0.0f64);
    for (i, (a, b)) in phi.states.iter().zip(&chi.states).enumerate() {
        num += a.u * b.u;
        den += a.u * a.u;
        if a.u.abs() > peak.1 {
            peak = (i, a.u.abs());
        }
    }
    if den == 0.0 {
        return Err(Error::ZeroNorm(lambda));
    }
    let beta = num / den;
    let pointwise = chi.states[peak.0].u / phi.states[peak.0].u;
    let mismatch = (pointwise - beta).abs() / beta.abs();
    if beta == 0.0 || mismatch.is_nan() || mismatch > 1e-6 {
        return Err(Error::ProportionalityViolation { lambda, mismatch });
    }
    Ok(beta)
}

/// `β` with `χ = β·φ` for the canonically normalized left and right solutions.
pub fn beta(p: &Problem, lambda: f64) -> Result<f64> {
    beta_between(&propagator::solve_left(p, lambda), &propagator::solve_right(p, lambda), lambda)
}

/// One row of the asymptotic diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRow {
    pub n: usize,
    pub lambda: f64,
    pub beta: f64,
    /// `β_n (−1)ⁿ (n − κ)^{ind f − ind F} − 1`, with `κ = (ind f + ind F)/2`;
    /// undefined where `n = κ`.
    pub xi: Option<f64>,
    /// `sign(λ_n)√|λ_n| − (n − κ)`.
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub rows: Vec<AsymptoticRow>,
    /// Running sums of `ξ_n²`.
    pub xi_partial_sums: Vec<f64>,
    /// Set when the last quarter of `|ξ|` is not smaller on average than the
    /// second quarter.
    pub xi_tail_not_decaying: bool,
    pub offset_tail_not_decaying: bool,
}

fn tail_not_decaying(values: &[f64]) -> bool {
    let q = values.len() / 4;
    if q == 0 {
        return false;
    }
    let mean = |s: &[f64]| s.iter().map(|v| v.abs()).sum::<f64>() / s.len() as f64;
    let early = mean(&values[q..2 * q]);
    let late = mean(&values[values.len() - q..]);
    late > 1e-8 && late >= early
}

pub fn asymptotic_diagnostics(sp: &Spectrum) -> Result<AsymptoticReport> {
    if sp.len() < 10 {
        return Err(Error::InvalidRequest(format!(
            "asymptotic diagnostics need at least 10 eigenpairs, have {}",
            sp.len()
        )));
    }
    let shift = (sp.index_f() + sp.index_big_f()) as f64 / 2.0;
    let exponent = sp.index_f() as i32 - sp.index_big_f() as i32;
    let rows: Vec<AsymptoticRow> = sp
        .pairs
        .iter()
        .map(|pair| {
            let base = pair.n as f64 - shift;
            let sign = if pair.n % 2 == 0 { 1.0 } else { -1.0 };
            let xi = (base != 0.0).then(|| pair.beta * sign * base.powi(exponent) - 1.0);
            AsymptoticRow { n: pair.n, lambda: pair.lambda, beta: pair.beta, xi, offset: to_t(pair.lambda) - base }
        })
        .collect();
    let mut acc = 0.0;
    let xi_partial_sums = rows
        .iter()
        .map(|r| {
            acc += r.xi.map_or(0.0, |x| x * x);
            acc
        })
        .collect();
    let xis: Vec<f64> = rows.iter().filter_map(|r| r.xi).collect();
    let offsets: Vec<f64> = rows.iter().map(|r| r.offset).collect();
    Ok(AsymptoticReport {
        xi_tail_not_decaying: tail_not_decaying(&xis),
        offset_tail_not_decaying: tail_not_decaying(&offsets),
        rows,
        xi_partial_sums,
    })
}
