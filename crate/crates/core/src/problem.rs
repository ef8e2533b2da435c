//! Boundary value problem data and the weighted inner product of the
//! linearized space `L²(0,π) ⊕ ℝᴺ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rational::RationalHerglotz;

/// Real potential coefficient `s`, piecewise constant on a uniform partition
/// of `[0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    samples: Vec<f64>,
}

impl Potential {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidPotential("at least one cell is required".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential(format!("sample {i} is not finite")));
        }
        Ok(Self { samples })
    }

    pub fn zero(cells: usize) -> Result<Self> {
        Self::new(vec![0.0; cells])
    }

    /// Midpoint sampling of a function on `cells` uniform cells.
    pub fn from_fn(cells: usize, s: impl Fn(f64) -> f64) -> Result<Self> {
        let width = PI / cells as f64;
        Self::new((0..cells).map(|i| s((i as f64 + 0.5) * width)).collect())
    }

    /// `s(x) = c·(x − π/2)`, antisymmetric about `π/2`.
    pub fn linear_antisymmetric(cells: usize, c: f64) -> Result<Self> {
        let width = PI / cells as f64;
        // Written so that mirrored cells give exactly opposite values.
        Self::new(
            (0..cells).map(|i| c * 0.5 * width * (2.0 * i as f64 + 1.0 - cells as f64)).collect(),
        )
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn cells(&self) -> usize {
        self.samples.len()
    }

    pub fn cell_width(&self) -> f64 {
        PI / self.samples.len() as f64
    }

    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|v| v * v).sum::<f64>() * self.cell_width()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Diagonal weight of the boundary coordinates, in the order
/// `δ_1⁻¹ … δ_d⁻¹, [h0⁻¹], Δ_1⁻¹ … Δ_D⁻¹, [H0⁻¹]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    diagonal: Vec<f64>,
}

impl WeightMatrix {
    fn from_sides(f: &RationalHerglotz, big_f: &RationalHerglotz) -> Self {
        let mut diagonal = Vec::with_capacity(f.capacity() + big_f.capacity());
        for side in [f, big_f] {
            diagonal.extend(side.poles().iter().map(|p| 1.0 / p.residue));
            if side.h0() > 0.0 {
                diagonal.push(1.0 / side.h0());
            }
        }
        Self { diagonal }
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    /// `Σ W_kk a_k b_k`.
    pub fn form(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        for v in [a, b] {
            if v.len() != self.len() {
                return Err(Error::LengthMismatch { expected: self.len(), got: v.len() });
            }
        }
        Ok(self.diagonal.iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum())
    }
}

/// The boundary value problem: potential plus the two boundary coefficients
/// `y^[1](0)/y(0) = −f(λ)` and `y^[1](π)/y(π) = F(λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    s: Potential,
    f: RationalHerglotz,
    big_f: RationalHerglotz,
}

impl Problem {
    pub fn build(s: Potential, f: RationalHerglotz, big_f: RationalHerglotz) -> Result<Self> {
        let problem = Self { s, f, big_f };
        let weights = problem.weight().len();
        if weights != problem.n() {
            return Err(Error::DimensionMismatch { weights, n: problem.n() });
        }
        Ok(problem)
    }

    pub fn potential(&self) -> &Potential {
        &self.s
    }

    pub fn f(&self) -> &RationalHerglotz {
        &self.f
    }

    /// The right boundary coefficient `F`.
    pub fn big_f(&self) -> &RationalHerglotz {
        &self.big_f
    }

    /// Number of boundary coordinates (and of eigenfunctions to remove).
    pub fn n(&self) -> usize {
        self.f.capacity() + self.big_f.capacity()
    }

    /// Sum of the two indices, `ind f + ind F`.
    pub fn total_index(&self) -> usize {
        self.f.index() + self.big_f.index()
    }

    pub fn weight(&self) -> WeightMatrix {
        WeightMatrix::from_sides(&self.f, &self.big_f)
    }

    /// `s(x) + s(π − x) = 0` within `tol` and `f = F`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let samples = self.s.samples();
        let antisymmetric =
            samples.iter().zip(samples.iter().rev()).all(|(a, b)| (a + b).abs() <= tol);
        antisymmetric && self.f == self.big_f
    }
}

/// Composite Simpson rule for samples on a uniform grid.
///
/// # Panics
///
/// Panics unless the number of samples is odd and at least three.
pub fn simpson(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "simpson needs an odd number (>= 3) of samples, got {n}");
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    step / 3.0 * (values[0] + values[n - 1] + 4.0 * odd + 2.0 * even)
}

/// Simpson approximation of `∫ a(x) b(x) dx`.
pub fn simpson_product(a: &[f64], b: &[f64], step: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), got: b.len() });
    }
    let n = a.len();
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n.saturating_sub(1) {
        if i % 2 == 1 {
            odd += a[i] * b[i];
        } else {
            even += a[i] * b[i];
        }
    }
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidRequest(format!(
            "quadrature needs an odd number (>= 3) of samples, got {n}"
        )));
    }
    Ok(step / 3.0 * (a[0] * b[0] + a[n - 1] * b[n - 1] + 4.0 * odd + 2.0 * even))
}

/// An element of the linearized space: sampled function plus boundary vector.
#[derive(Debug, Clone, Copy)]
pub struct HVector<'a> {
    pub values: &'a [f64],
    pub boundary: &'a [f64],
}

impl<'a> HVector<'a> {
    pub fn new(values: &'a [f64], boundary: &'a [f64]) -> Self {
        Self { values, boundary }
    }
}

/// `∫₀^π u v dx + Σ W_kk û_k v̂_k`, with the integral by Simpson on a grid
/// of spacing `step`.
pub fn h_inner(u: HVector<'_>, v: HVector<'_>, w: &WeightMatrix, step: f64) -> Result<f64> {
    Ok(simpson_product(u.values, v.values, step)? + w.form(u.boundary, v.boundary)?)
}
