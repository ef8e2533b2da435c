//! Shared fixtures and independent oracles for the integration tests.
//!
//! Nothing here calls into the propagator or the spectrum code; the oracles
//! work from the differential equation or from closed-form transcendental
//! equations directly.

#![allow(dead_code)]

use std::f64::consts::PI;

use riesz_core::{Potential, Problem, RationalHerglotz, SolverOptions, Spectrum};

pub fn lin() -> RationalHerglotz {
    RationalHerglotz::affine(1.0, 0.0).unwrap()
}

/// `s ≡ 0`, `f = F = λ`: the symmetric model problem.
pub fn symmetric_model(cells: usize) -> Problem {
    Problem::build(Potential::zero(cells).unwrap(), lin(), lin()).unwrap()
}

pub fn neumann(cells: usize) -> Problem {
    Problem::build(Potential::zero(cells).unwrap(), RationalHerglotz::zero(), RationalHerglotz::zero())
        .unwrap()
}

pub fn spectrum(p: &Problem, n_max: usize) -> Spectrum {
    Spectrum::compute(p, n_max, &SolverOptions::default()).unwrap()
}

/// Classical RK4 for `u' = a u + v`, `v' = −(a² + λ) u − a v`, integrating
/// each potential cell with `substeps` equal steps (negative width integrates
/// backwards).
pub fn rk4_cell(a: f64, lambda: f64, width: f64, substeps: usize, (u, v): (f64, f64)) -> (f64, f64) {
    let rhs = |u: f64, v: f64| (a * u + v, -(a * a + lambda) * u - a * v);
    let h = width / substeps as f64;
    let (mut u, mut v) = (u, v);
    for _ in 0..substeps {
        let k1 = rhs(u, v);
        let k2 = rhs(u + 0.5 * h * k1.0, v + 0.5 * h * k1.1);
        let k3 = rhs(u + 0.5 * h * k2.0, v + 0.5 * h * k2.1);
        let k4 = rhs(u + h * k3.0, v + h * k3.1);
        u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (u, v)
}

/// RK4 solution sampled every `1/per_cell` of a cell, left to right.
pub fn rk4_left(samples: &[f64], lambda: f64, start: (f64, f64), per_cell: usize, substeps: usize) -> Vec<(f64, f64)> {
    let width = PI / samples.len() as f64 / per_cell as f64;
    let mut out = vec![start];
    let mut st = start;
    for &a in samples {
        for _ in 0..per_cell {
            st = rk4_cell(a, lambda, width, substeps, st);
            out.push(st);
        }
    }
    out
}

/// RK4 solution from `x = π` backwards, returned in increasing `x` order.
pub fn rk4_right(samples: &[f64], lambda: f64, end: (f64, f64), per_cell: usize, substeps: usize) -> Vec<(f64, f64)> {
    let width = PI / samples.len() as f64 / per_cell as f64;
    let mut out = vec![end];
    let mut st = end;
    for &a in samples.iter().rev() {
        for _ in 0..per_cell {
            st = rk4_cell(a, lambda, -width, substeps, st);
            out.push(st);
        }
    }
    out.reverse();
    out
}

/// Roots of `g` on `(lo, hi]` by sign scanning with step `dt` and bisection
/// to machine precision.
pub fn scalar_roots(g: impl Fn(f64) -> f64, lo: f64, hi: f64, dt: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut a = lo;
    let mut ga = g(a);
    while a < hi {
        let b = (a + dt).min(hi);
        let gb = g(b);
        if ga == 0.0 {
            roots.push(a);
        } else if ga * gb < 0.0 {
            let (mut x0, mut x1, mut g0) = (a, b, ga);
            for _ in 0..200 {
                let mid = 0.5 * (x0 + x1);
                if mid <= x0 || mid >= x1 {
                    break;
                }
                let gm = g(mid);
                if gm == 0.0 {
                    x0 = mid;
                    x1 = mid;
                    break;
                }
                if gm * g0 > 0.0 {
                    x0 = mid;
                    g0 = gm;
                } else {
                    x1 = mid;
                }
            }
            roots.push(0.5 * (x0 + x1));
        }
        a = b;
        ga = gb;
    }
    roots
}

/// `√λ_n` for `s ≡ 0`, `f = F = λ`: `λ = 0` and the positive roots of
/// `(τ² − 1) sin τπ − 2τ cos τπ`, i.e. `tan τπ = 2τ/(τ² − 1)`.
pub fn symmetric_model_taus(count: usize) -> Vec<f64> {
    let g = |t: f64| (t * t - 1.0) * (t * PI).sin() - 2.0 * t * (t * PI).cos();
    let mut taus = vec![0.0];
    taus.extend(scalar_roots(g, 1e-9, count as f64 + 2.0, 1e-3));
    taus.truncate(count);
    taus
}

/// `√λ_n` for `s ≡ 0`, `f = λ`, `F = 0`: `λ = 0` and the positive roots of
/// `sin τπ + τ cos τπ`.
pub fn left_linear_taus(count: usize) -> Vec<f64> {
    let g = |t: f64| (t * PI).sin() + t * (t * PI).cos();
    let mut taus = vec![0.0];
    taus.extend(scalar_roots(g, 1e-9, count as f64 + 2.0, 1e-3));
    taus.truncate(count);
    taus
}

/// Deterministic pseudo-random trigonometric polynomial on a grid.
pub fn trig_polynomial(grid: &[f64], seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let terms: Vec<(f64, f64, f64)> = (0..8)
        .map(|k| (k as f64, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    grid.iter()
        .map(|&x| terms.iter().map(|(k, a, b)| a * (k * x).cos() + b * (k * x).sin()).sum())
        .collect()
}
