//! Acceptance suite. Each test checks one criterion at its pinned tolerance
//! and prints a single PASS/FAIL line; run with `--nocapture` to see them.

mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;

use common::*;
use nalgebra::DMatrix;
use rand::{seq::SliceRandom, SeedableRng};
use riesz_core::problem::simpson_product;
use riesz_core::reduced::{self, ReductionKind};
use riesz_core::riesz::{self, ThetaMap, ThetaSet, Verdict, VerdictThresholds};
use riesz_core::spectrum::{self, asymptotic_diagnostics};
use riesz_core::{propagator, Pole, Potential, Problem, RationalHerglotz, SolverOptions, Spectrum};

fn verdict_line(id: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {id:>2} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

const SYMMETRIC_CELLS: usize = 512;
const SYMMETRIC_N_MAX: usize = 45;

fn symmetric() -> &'static (Problem, Spectrum) {
    static CELL: OnceLock<(Problem, Spectrum)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = symmetric_model(SYMMETRIC_CELLS);
        let sp = spectrum(&p, SYMMETRIC_N_MAX);
        (p, sp)
    })
}

fn theta(indices: &[usize]) -> ThetaSet {
    ThetaSet::new(indices.to_vec(), indices.len()).unwrap()
}

/// Limit of the smallest Gram-section eigenvalue: `σ_min(M_Θ W^{1/2})²`.
///
/// The vectors `(ψ_n, ψ̂_n)` form an orthonormal basis, so the weighted
/// boundary coordinates satisfy `Σ_n W^{1/2} ψ̂_n ψ̂_nᵀ W^{1/2} = I`. The
/// retained Gram matrix is `I − V Vᵀ` with `V` the retained weighted rows,
/// so its infimum over sections is `1 − λ_max(I − Σ_{k∈Θ} w_k w_kᵀ)`.
fn infinite_section_floor(sp: &Spectrum, th: &ThetaSet) -> f64 {
    let m = riesz::build_m(sp, th).unwrap();
    let w = sp.weight().diagonal();
    let scaled = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * w[j].sqrt());
    riesz::singular_values(&scaled).last().copied().unwrap().powi(2)
}

#[test]
fn criterion_01_classical_recovery() {
    let p = neumann(1024);
    let sp = spectrum(&p, 20);
    let mut worst_lambda = 0.0f64;
    let mut worst_fn = 0.0f64;
    for pair in &sp.pairs {
        let n = pair.n as f64;
        worst_lambda = worst_lambda.max((pair.lambda - n * n).abs());
        let norm = if pair.n == 0 { 1.0 / PI.sqrt() } else { (2.0 / PI).sqrt() };
        let reference: Vec<f64> = sp.grid().iter().map(|x| norm * (n * x).cos()).collect();
        let diff: Vec<f64> = pair.values().iter().zip(&reference).map(|(a, b)| a - b).collect();
        worst_fn = worst_fn.max(simpson_product(&diff, &diff, sp.step()).unwrap().sqrt());
    }
    verdict_line(
        1,
        "classical recovery",
        worst_lambda <= 1e-8 && worst_fn <= 1e-6,
        format!("max |λ_n − n²| = {worst_lambda:.2e}, max L² distance = {worst_fn:.2e}"),
    );
}

#[test]
fn criterion_02_separable_oracle() {
    let (_, sp) = symmetric();
    let taus = symmetric_model_taus(16);
    let worst = sp.pairs[..16]
        .iter()
        .zip(&taus)
        .map(|(pair, tau)| (pair.lambda.sqrt() - tau).abs())
        .fold(0.0, f64::max);
    verdict_line(2, "separable oracle", worst <= 1e-8, format!("max |τ_n − τ_oracle| = {worst:.2e}"));
}

fn h_gram_deviation(sp: &Spectrum, count: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..count {
        for j in 0..=i {
            let g = sp.h_inner_pairs(&sp.pairs[i], &sp.pairs[j]).unwrap();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

#[test]
fn criterion_03_h_orthonormality() {
    let (_, sp) = symmetric();
    let free = h_gram_deviation(sp, 16);
    let p = Problem::build(Potential::linear_antisymmetric(4096, 1.0).unwrap(), lin(), lin()).unwrap();
    let sp2 = spectrum(&p, 15);
    let potential = h_gram_deviation(&sp2, 16);
    verdict_line(
        3,
        "H-orthonormality",
        free <= 1e-6 && potential <= 1e-6,
        format!("max deviation: s = 0 {free:.2e}, linear antisymmetric s {potential:.2e}"),
    );
}

#[test]
fn criterion_04_singular_side() {
    let (_, sp) = symmetric();
    let mut details = Vec::new();
    let mut pass = true;
    for idx in [[0, 2], [1, 3]] {
        let th = theta(&idx);
        let m = riesz::build_m(sp, &th).unwrap();
        let scale = riesz::row_scale(&m);
        let sigma_min = *riesz::singular_values(&m).last().unwrap();
        let defect = riesz::completeness_defect(sp, &th, 30).unwrap();
        let residual = defect.residuals.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
        let gram = riesz::gram_section(sp, &th, &[10, 20, 40]).unwrap();
        let decreasing = gram.windows(2).all(|w| w[1].min_eig < w[0].min_eig);
        pass &= sigma_min <= 1e-8 * scale && residual <= 1e-6 && decreasing;
        details.push(format!(
            "Θ={idx:?}: σ_min/scale = {:.2e}, max residual = {residual:.2e}, Gram min = [{}]",
            sigma_min / scale,
            gram.iter().map(|g| format!("{:.4e}", g.min_eig)).collect::<Vec<_>>().join(", ")
        ));
    }
    verdict_line(4, "basis criterion, singular side", pass, details.join("; "));
}

#[test]
fn criterion_05_invertible_side() {
    let (_, sp) = symmetric();
    let mut details = Vec::new();
    let mut pass = true;
    for idx in [[0, 1], [2, 5]] {
        let th = theta(&idx);
        let m = riesz::build_m(sp, &th).unwrap();
        let v = riesz::verdict(&m, riesz::row_scale(&m));
        let gram = riesz::gram_section(sp, &th, &[10, 20, 40]).unwrap();
        let mins: Vec<f64> = gram.iter().map(|g| g.min_eig).collect();
        let (lo, hi) = mins.iter().fold((f64::MAX, f64::MIN), |(a, b), &m| (a.min(m), b.max(m)));
        let variation = (hi - lo) / hi;
        let floor = infinite_section_floor(sp, &th);

        let map = ThetaMap::new(sp, &th).unwrap();
        let retained: Vec<Vec<f64>> =
            (0..=20).filter(|n| !th.contains(*n)).map(|n| sp.pairs[n].values()).collect();
        let mut worst = 0.0f64;
        for (i, a) in retained.iter().enumerate() {
            for (j, b) in retained.iter().enumerate().take(i + 1) {
                let g = map.theta_inner(a, b).unwrap();
                worst = worst.max((g - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        let checks = [
            ("verdict basis", v == Verdict::Basis),
            ("Gram min variation < 20%", variation < 0.2),
            ("Gram min above floor", floor > 0.0 && lo > floor * (1.0 - 1e-9)),
            ("Θ-Gram identity", worst <= 1e-6),
        ];
        let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
        pass &= failed.is_empty();
        details.push(format!(
            "Θ={idx:?}: verdict {}, Gram min = [{}], variation {:.1}%, floor {floor:.4e}, Θ-Gram deviation {worst:.2e}{}",
            v.as_str(),
            mins.iter().map(|m| format!("{m:.4e}")).collect::<Vec<_>>().join(", "),
            100.0 * variation,
            if failed.is_empty() { String::new() } else { format!(" [failed: {}]", failed.join(", ")) }
        ));
    }
    verdict_line(5, "basis criterion, invertible side", pass, details.join("; "));
}

#[test]
fn criterion_06_fixed_point_identity() {
    let (_, sp) = symmetric();
    let mut worst = 0.0f64;
    for idx in [[0, 1], [2, 5], [3, 10]] {
        let th = theta(&idx);
        let map = ThetaMap::new(sp, &th).unwrap();
        for n in (0..=20).filter(|n| !th.contains(*n)) {
            let pair = &sp.pairs[n];
            let yt = map.y_theta(&pair.values()).unwrap();
            for (a, b) in yt.iter().zip(&pair.psi_hat) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    verdict_line(6, "y_Θ fixed-point identity", worst <= 1e-6, format!("max entry error {worst:.2e}"));
}

#[test]
fn criterion_07_sandwich_inequality() {
    let (_, sp) = symmetric();
    let mut violations = 0;
    let mut tightest = f64::MAX;
    for idx in [[0, 1], [2, 5]] {
        let th = theta(&idx);
        let map = ThetaMap::new(sp, &th).unwrap();
        let c = map.equivalence_constant().unwrap();
        for seed in 0..20 {
            let y = trig_polynomial(sp.grid(), seed);
            let l2 = sp.l2_inner(&y, &y).unwrap();
            let t = map.theta_inner(&y, &y).unwrap();
            if !(l2 <= t * (1.0 + 1e-12) && t <= c * l2) {
                violations += 1;
            }
            tightest = tightest.min(c * l2 - t);
        }
    }
    verdict_line(
        7,
        "sandwich inequality",
        violations == 0,
        format!("{violations} violations over 40 checks, smallest upper slack {tightest:.3e}"),
    );
}

#[test]
fn criterion_08_one_sided_case() {
    let f = RationalHerglotz::new(1.0, 0.0, vec![Pole { location: 0.0, residue: 1.0 }]).unwrap();
    let p = Problem::build(Potential::zero(512).unwrap(), f, RationalHerglotz::zero()).unwrap();
    let sp = spectrum(&p, 25);
    assert_eq!(reduced::applicable_reduction(&p), Some(ReductionKind::OneSided));
    let mut pairs: Vec<[usize; 2]> =
        (0..=25).flat_map(|a| ((a + 1)..=25).map(move |b| [a, b])).collect();
    pairs.shuffle(&mut rand::rngs::StdRng::seed_from_u64(8));
    let mut basis = 0;
    let mut agree = 0;
    for idx in pairs.iter().take(50) {
        let check = reduced::cross_validate(&p, &sp, &theta(idx), &VerdictThresholds::default()).unwrap();
        basis += usize::from(check.full_verdict == Verdict::Basis);
        agree += usize::from(check.agree);
    }
    verdict_line(
        8,
        "one-sided case",
        basis == 50 && agree == 50,
        format!("{basis}/50 basis verdicts, {agree}/50 reduced agreements"),
    );
}

#[test]
fn criterion_09_parity_law() {
    let (p, sp) = symmetric();
    let mut mismatches = Vec::new();
    for n1 in 0..=10 {
        for n2 in (n1 + 1)..=10 {
            let check = reduced::cross_validate(p, sp, &theta(&[n1, n2]), &VerdictThresholds::default()).unwrap();
            let expected = if (n1 + n2) % 2 == 1 { Verdict::Basis } else { Verdict::NotBasis };
            if check.full_verdict != expected || !check.agree {
                mismatches.push((n1, n2));
            }
        }
    }
    let beta_err = sp.pairs[..=10]
        .iter()
        .map(|pair| (pair.beta - if pair.n % 2 == 0 { 1.0 } else { -1.0 }).abs())
        .fold(0.0, f64::max);
    verdict_line(
        9,
        "parity law",
        mismatches.is_empty() && beta_err <= 1e-6,
        format!("{} mismatched pairs {mismatches:?}, max |β_n − (−1)ⁿ| = {beta_err:.2e}", mismatches.len()),
    );
}

/// `ind f = 1`, `ind F = 2`, smooth nonzero potential.
pub fn beta_asymptotics_problem() -> Problem {
    let f = RationalHerglotz::affine(1.0, 0.5).unwrap();
    let big_f = RationalHerglotz::new(0.0, 0.3, vec![Pole { location: 2.0, residue: 1.0 }]).unwrap();
    let s = Potential::from_fn(1024, |x| 0.3 * x.cos()).unwrap();
    Problem::build(s, f, big_f).unwrap()
}

#[test]
fn criterion_10_beta_asymptotics() {
    let p = beta_asymptotics_problem();
    let sp = spectrum(&p, 40);
    let report = asymptotic_diagnostics(&sp).unwrap();
    let xi: Vec<f64> = report.rows[20..=40].iter().map(|r| r.xi.unwrap().abs()).collect();
    let max_xi = xi.iter().copied().fold(0.0, f64::max);
    let mut ratios: Vec<f64> = xi.windows(2).map(|w| w[1] / w[0]).collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = ratios[ratios.len() / 2];
    let alternating = sp.pairs.windows(2).all(|w| w[0].beta * w[1].beta < 0.0);
    verdict_line(
        10,
        "β asymptotics",
        max_xi <= 0.1 && median <= 1.0 && alternating,
        format!("max |ξ_n| (20..40) = {max_xi:.3e}, median ratio {median:.4}, alternating {alternating}"),
    );
}

#[test]
fn criterion_11_propagator_exactness_and_convergence() {
    use rand::Rng;
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let mut worst_det = 0.0f64;
    for _ in 0..100 {
        let cells = rng.gen_range(1..200);
        let samples: Vec<f64> = (0..cells).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let lambda = rng.gen_range(-2.0..400.0);
        let p = Problem::build(Potential::new(samples).unwrap(), RationalHerglotz::zero(), RationalHerglotz::zero())
            .unwrap();
        let m = propagator::transfer_matrix(&p, lambda);
        worst_det = worst_det.max((m[0][0] * m[1][1] - m[0][1] * m[1][0] - 1.0).abs());
    }

    let smooth = |x: f64| (2.0 * x).sin() + 0.5 * x;
    let eigen = |cells: usize| {
        let p = Problem::build(Potential::from_fn(cells, smooth).unwrap(), lin(), RationalHerglotz::zero())
            .unwrap();
        spectrum::find_eigenvalues(&p, 5, &SolverOptions::default()).unwrap()
    };
    let (a, b, c) = (eigen(64), eigen(128), eigen(256));
    let worst_ratio = (0..=5)
        .map(|n| (a[n] - b[n]).abs() / (b[n] - c[n]).abs())
        .fold(f64::MAX, f64::min);
    verdict_line(
        11,
        "propagator exactness and convergence",
        worst_det <= 1e-10 && worst_ratio >= 3.5,
        format!("max |det − 1| = {worst_det:.2e}, min refinement ratio {worst_ratio:.3}"),
    );
}
