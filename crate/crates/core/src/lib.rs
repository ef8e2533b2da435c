//! Spectral computations for one-dimensional Schrödinger operators with
//! distributional (quasi-derivative) potentials and boundary conditions
//! depending rationally on the eigenvalue parameter, together with a
//! Riesz-basis test for eigenfunction families with `N` members removed.
//!
//! The pipeline is
//! [`problem::Problem`] → [`spectrum::Spectrum`] → [`riesz::basis_check`],
//! with [`reduced`] providing closed-form cross-checks in the special cases
//! where the boundary matrix simplifies.

pub mod error;
pub mod problem;
pub mod propagator;
pub mod rational;
pub mod reduced;
pub mod riesz;
pub mod spectrum;

pub use error::{Error, Result};
pub use problem::{Potential, Problem, WeightMatrix};
pub use rational::{Pole, Polynomial, RationalHerglotz};
pub use riesz::{RieszReport, ThetaSet, Verdict, VerdictThresholds};
pub use spectrum::{EigenPair, SolverOptions, Spectrum};
