//! Rational Herglotz–Nevanlinna boundary coefficients
//!
//! A boundary coefficient has the form
//!
//! ```text
//! f(λ) = h0·λ + h + Σ_k δ_k / (h_k − λ),   h0 ≥ 0, δ_k > 0, h_1 < … < h_d.
//! ```
//!
//! Everything downstream works with the pole-free pair `f↑ = f·f↓`,
//! `f↓ = h0'·Π(h_k − λ)` where `h0' = 1/h0` if `h0 > 0` and `1` otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial, trimming trailing zero coefficients.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(0.0)
                    + other.coeffs.get(i).copied().unwrap_or(0.0)
            })
            .collect();
        Self::new(coeffs)
    }

    /// Product by convolution.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `Π (r − λ)` over the given locations.
    pub fn product_of_linear(locations: impl IntoIterator<Item = f64>) -> Self {
        locations
            .into_iter()
            .fold(Self::constant(1.0), |acc, r| acc.mul(&Self::new(vec![r, -1.0])))
    }
}

/// A simple pole `δ / (location − λ)` with positive residue `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: f64,
    pub residue: f64,
}

/// Rational Herglotz–Nevanlinna function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HerglotzRepr", into = "HerglotzRepr")]
pub struct RationalHerglotz {
    h0: f64,
    h: f64,
    poles: Vec<Pole>,
}

#[derive(Serialize, Deserialize)]
struct HerglotzRepr {
    #[serde(default)]
    h0: f64,
    #[serde(default)]
    h: f64,
    #[serde(default)]
    poles: Vec<[f64; 2]>,
}

impl TryFrom<HerglotzRepr> for RationalHerglotz {
    type Error = Error;

    fn try_from(repr: HerglotzRepr) -> Result<Self> {
        RationalHerglotz::new(
            repr.h0,
            repr.h,
            repr.poles.iter().map(|&[location, residue]| Pole { location, residue }).collect(),
        )
    }
}

impl From<RationalHerglotz> for HerglotzRepr {
    fn from(f: RationalHerglotz) -> Self {
        HerglotzRepr {
            h0: f.h0,
            h: f.h,
            poles: f.poles.iter().map(|p| [p.location, p.residue]).collect(),
        }
    }
}

impl RationalHerglotz {
    /// Validates and builds `h0·λ + h + Σ δ_k/(h_k − λ)`.
    ///
    /// Pole locations must already be strictly increasing; unsorted input is
    /// rejected rather than reordered.
    pub fn new(h0: f64, h: f64, poles: Vec<Pole>) -> Result<Self> {
        if !h0.is_finite() || h0 < 0.0 {
            return Err(Error::InvalidHerglotz(format!("h0 must be finite and >= 0, got {h0}")));
        }
        if !h.is_finite() {
            return Err(Error::InvalidHerglotz(format!("h must be finite, got {h}")));
        }
        for (k, p) in poles.iter().enumerate() {
            if !p.location.is_finite() {
                return Err(Error::InvalidHerglotz(format!("pole {k} has non-finite location")));
            }
            if !(p.residue.is_finite() && p.residue > 0.0) {
                return Err(Error::InvalidHerglotz(format!(
                    "pole {k} must have a positive finite residue, got {}",
                    p.residue
                )));
            }
        }
        if let Some(w) = poles.windows(2).find(|w| w[0].location >= w[1].location) {
            return Err(Error::InvalidHerglotz(format!(
                "pole locations must be strictly increasing ({} then {})",
                w[0].location, w[1].location
            )));
        }
        Ok(Self { h0, h, poles })
    }

    /// `h0·λ + h`.
    pub fn affine(h0: f64, h: f64) -> Result<Self> {
        Self::new(h0, h, Vec::new())
    }

    /// The zero function (Neumann-type condition).
    pub fn zero() -> Self {
        Self { h0: 0.0, h: 0.0, poles: Vec::new() }
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn is_constant(&self) -> bool {
        self.index() == 0
    }

    pub fn eval(&self, lambda: f64) -> Result<f64> {
        let mut value = self.h0 * lambda + self.h;
        for p in &self.poles {
            if (lambda - p.location).abs() < 1e-12 * p.location.abs().max(1.0) {
                return Err(Error::PoleHit { lambda, pole: p.location });
            }
            value += p.residue / (p.location - lambda);
        }
        Ok(value)
    }

    /// `2d + 1` if `h0 > 0`, else `2d`.
    pub fn index(&self) -> usize {
        2 * self.poles.len() + usize::from(self.h0 > 0.0)
    }

    /// `⌈index / 2⌉`, the number of boundary coordinates this side contributes.
    pub fn capacity(&self) -> usize {
        self.index().div_ceil(2)
    }

    /// `h0'`: `1/h0` when `h0 > 0`, otherwise 1.
    pub fn down_scale(&self) -> f64 {
        if self.h0 > 0.0 {
            1.0 / self.h0
        } else {
            1.0
        }
    }

    /// `p(λ) = Π_k (h_k − λ)`.
    pub fn pole_product(&self) -> Polynomial {
        Polynomial::product_of_linear(self.poles.iter().map(|p| p.location))
    }

    /// `p_m(λ) = Π_{k≠m} (h_k − λ)` (zero-based `m`).
    pub fn pole_product_without(&self, m: usize) -> Polynomial {
        Polynomial::product_of_linear(
            self.poles.iter().enumerate().filter(|&(k, _)| k != m).map(|(_, p)| p.location),
        )
    }

    /// The pair `(f↑, f↓)` with `f = f↑ / f↓`.
    pub fn updown(&self) -> (Polynomial, Polynomial) {
        let scale = self.down_scale();
        let p = self.pole_product();
        let down = p.scale(scale);
        let mut up = Polynomial::new(vec![self.h, self.h0]).mul(&p);
        for (m, pole) in self.poles.iter().enumerate() {
            up = up.add(&self.pole_product_without(m).scale(pole.residue));
        }
        (up.scale(scale), down)
    }
}
