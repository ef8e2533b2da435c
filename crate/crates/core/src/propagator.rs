//! Exact propagation of the quasi-derivative system.
//!
//! With `u = y` and `v = y^[1] = y' − s·y`, the equation becomes
//!
//! ```text
//! u' =  a·u + v
//! v' = −(a² + λ)·u − a·v
//! ```
//!
//! on a cell where `s ≡ a`. The coefficient matrix `A` has zero trace and
//! determinant `λ`, so `A² = −λ·I` and `exp(A·h) = c·I + s̃·A` in closed form.

use std::f64::consts::PI;

use crate::problem::Problem;

/// Number of output samples per potential cell. Even, so that Simpson panels
/// never straddle a cell boundary.
pub const SUBSAMPLES: usize = 8;

/// `(y, y^[1])` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub u: f64,
    pub v: f64,
}

impl State {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    fn scaled(self, factor: f64) -> Self {
        Self { u: self.u * factor, v: self.v * factor }
    }

    fn max_abs(self) -> f64 {
        self.u.abs().max(self.v.abs())
    }
}

/// A solution sampled on the uniform output grid (`SUBSAMPLES` points per cell).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Vec<f64>,
    pub states: Vec<State>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Grid spacing (uniform).
    pub fn step(&self) -> f64 {
        PI / (self.grid.len() - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.u).collect()
    }

    pub fn quasi_derivatives(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.v).collect()
    }

    pub fn first(&self) -> State {
        self.states[0]
    }

    pub fn last(&self) -> State {
        self.states[self.states.len() - 1]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            states: self.states.iter().map(|s| s.scaled(factor)).collect(),
        }
    }
}

/// `(c, s̃)` with `exp(A·h) = c·I + s̃·A`; valid for either sign of `h`.
pub fn cell_coefficients(lambda: f64, h: f64) -> (f64, f64) {
    let z = lambda * h * h;
    if z.abs() < 1e-6 {
        // Taylor series of cos(√z) and sin(√z)/√z; the λ = 0 singularity is removable.
        let c = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0;
        let s = h * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
        (c, s)
    } else if lambda > 0.0 {
        let k = lambda.sqrt();
        ((k * h).cos(), (k * h).sin() / k)
    } else {
        let k = (-lambda).sqrt();
        ((k * h).cosh(), (k * h).sinh() / k)
    }
}

#[inline]
fn apply(a: f64, lambda: f64, (c, s): (f64, f64), st: State) -> State {
    State {
        u: (c + s * a) * st.u + s * st.v,
        v: -s * (a * a + lambda) * st.u + (c - s * a) * st.v,
    }
}

/// Propagates `st` across a cell of width `h` on which `s ≡ a`.
pub fn cell_step(a: f64, lambda: f64, h: f64, st: State) -> State {
    apply(a, lambda, cell_coefficients(lambda, h), st)
}

/// The 2×2 propagator of one cell, row-major.
pub fn cell_matrix(a: f64, lambda: f64, h: f64) -> [[f64; 2]; 2] {
    let (c, s) = cell_coefficients(lambda, h);
    [[c + s * a, s], [-s * (a * a + lambda), c - s * a]]
}

/// Product of all cell propagators from 0 to π.
pub fn transfer_matrix(p: &Problem, lambda: f64) -> [[f64; 2]; 2] {
    let h = p.potential().cell_width();
    let coeffs = cell_coefficients(lambda, h);
    let mut col0 = State::new(1.0, 0.0);
    let mut col1 = State::new(0.0, 1.0);
    for &a in p.potential().samples() {
        col0 = apply(a, lambda, coeffs, col0);
        col1 = apply(a, lambda, coeffs, col1);
    }
    [[col0.u, col1.u], [col0.v, col1.v]]
}

fn output_grid(cells: usize) -> Vec<f64> {
    let points = cells * SUBSAMPLES;
    let step = PI / points as f64;
    (0..=points).map(|i| if i == points { PI } else { i as f64 * step }).collect()
}

/// Initial state of `φ(·, λ)`: `(f↓(λ), −f↑(λ))`.
pub fn left_initial(p: &Problem, lambda: f64) -> State {
    let (up, down) = p.f().updown();
    State::new(down.eval(lambda), -up.eval(lambda))
}

/// Terminal state of `χ(·, λ)`: `(F↓(λ), F↑(λ))`.
pub fn right_terminal(p: &Problem, lambda: f64) -> State {
    let (up, down) = p.big_f().updown();
    State::new(down.eval(lambda), up.eval(lambda))
}

/// `φ(·, λ)` from `x = 0`.
pub fn solve_left(p: &Problem, lambda: f64) -> Trajectory {
    let s = p.potential();
    let coeffs = cell_coefficients(lambda, s.cell_width() / SUBSAMPLES as f64);
    let mut states = Vec::with_capacity(s.cells() * SUBSAMPLES + 1);
    let mut st = left_initial(p, lambda);
    states.push(st);
    for &a in s.samples() {
        for _ in 0..SUBSAMPLES {
            st = apply(a, lambda, coeffs, st);
            states.push(st);
        }
    }
    Trajectory { grid: output_grid(s.cells()), states }
}

/// `χ(·, λ)` from `x = π` backwards, returned in increasing `x` order.
pub fn solve_right(p: &Problem, lambda: f64) -> Trajectory {
    let s = p.potential();
    let coeffs = cell_coefficients(lambda, -s.cell_width() / SUBSAMPLES as f64);
    let mut states = Vec::with_capacity(s.cells() * SUBSAMPLES + 1);
    let mut st = right_terminal(p, lambda);
    states.push(st);
    for &a in s.samples().iter().rev() {
        for _ in 0..SUBSAMPLES {
            st = apply(a, lambda, coeffs, st);
            states.push(st);
        }
    }
    states.reverse();
    Trajectory { grid: output_grid(s.cells()), states }
}

/// A real number stored as `mantissa · 2^exponent`, for characteristic values
/// that overflow `f64` at strongly negative `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub exponent: i64,
}

impl ScaledValue {
    pub fn signum(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    /// `log2 |value|`; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        self.mantissa.abs().log2() + self.exponent as f64
    }

    /// The plain value; saturates to `±inf` (or 0) when out of range.
    pub fn value(&self) -> f64 {
        let e = self.exponent.clamp(-2000, 2000) as i32;
        if e.abs() > 1000 {
            // Split to avoid an intermediate overflow of 2^e.
            self.mantissa * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
        } else {
            self.mantissa * 2f64.powi(e)
        }
    }
}

const RESCALE_BITS: i32 = 256;

/// `φ(π, λ)` as a renormalized state plus the accumulated binary exponent.
pub fn left_endpoint_scaled(p: &Problem, lambda: f64) -> (State, i64) {
    let s = p.potential();
    let coeffs = cell_coefficients(lambda, s.cell_width());
    let big = 2f64.powi(RESCALE_BITS);
    let mut st = left_initial(p, lambda);
    let mut exponent = 0i64;
    for &a in s.samples() {
        st = apply(a, lambda, coeffs, st);
        if st.max_abs() > big {
            st = st.scaled(2f64.powi(-RESCALE_BITS));
            exponent += i64::from(RESCALE_BITS);
        }
    }
    (st, exponent)
}

/// `ω(λ) = φ^[1](π,λ)·F↓(λ) − φ(π,λ)·F↑(λ)` in overflow-safe form.
pub fn characteristic_scaled(p: &Problem, lambda: f64) -> ScaledValue {
    let (end, exponent) = left_endpoint_scaled(p, lambda);
    let target = right_terminal(p, lambda);
    ScaledValue { mantissa: end.v * target.u - end.u * target.v, exponent }
}

/// `ω(λ)`; its zeros are exactly the eigenvalues.
pub fn characteristic(p: &Problem, lambda: f64) -> f64 {
    characteristic_scaled(p, lambda).value()
}
