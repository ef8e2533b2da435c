//! Problem configuration: a TOML document with the grid, potential, boundary
//! functions, and run parameters. Command-line flags override file values.

use std::path::Path;

use riesz_core::{Potential, Problem, RationalHerglotz, SolverOptions, ThetaSet, VerdictThresholds};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MIN_GRID: usize = 16;
pub const DEFAULT_SIZES: [usize; 3] = [10, 20, 40];

/// Potential as written in the config: a preset name or explicit samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    Preset(String),
    Samples(Vec<f64>),
}

impl PotentialSpec {
    fn build(&self, cells: usize) -> Result<Potential, CliError> {
        match self {
            PotentialSpec::Samples(samples) => {
                if samples.len() != cells {
                    return Err(CliError::Config(format!(
                        "potential has {} samples but grid_size is {cells}",
                        samples.len()
                    )));
                }
                Ok(Potential::new(samples.clone())?)
            }
            PotentialSpec::Preset(name) => {
                let name = name.trim();
                if name == "zero" {
                    return Ok(Potential::zero(cells)?);
                }
                let c = name
                    .strip_prefix("linear_antisymmetric(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .ok_or_else(|| {
                        CliError::Config(format!(
                            "unknown potential preset {name:?}; expected \"zero\" or \"linear_antisymmetric(c)\""
                        ))
                    })?;
                let c: f64 = c.trim().parse().map_err(|_| {
                    CliError::Config(format!("linear_antisymmetric needs a number, got {c:?}"))
                })?;
                Ok(Potential::linear_antisymmetric(cells, c)?)
            }
        }
    }
}

/// Optional overrides of the numerical tolerances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub root_rel_tol: Option<f64>,
    pub initial_step: Option<f64>,
    pub max_refinements: Option<usize>,
    pub basis: Option<f64>,
    pub singular: Option<f64>,
}

impl Tolerances {
    pub fn solver(&self) -> SolverOptions {
        let d = SolverOptions::default();
        SolverOptions {
            root_rel_tol: self.root_rel_tol.unwrap_or(d.root_rel_tol),
            initial_step: self.initial_step.unwrap_or(d.initial_step),
            max_refinements: self.max_refinements.unwrap_or(d.max_refinements),
        }
    }

    pub fn thresholds(&self) -> VerdictThresholds {
        let d = VerdictThresholds::default();
        VerdictThresholds { basis: self.basis.unwrap_or(d.basis), singular: self.singular.unwrap_or(d.singular) }
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => {
                Err(CliError::Config(format!("tolerance {name} must be positive, got {x}")))
            }
            _ => Ok(()),
        };
        positive("root_rel_tol", self.root_rel_tol)?;
        positive("initial_step", self.initial_step)?;
        positive("basis", self.basis)?;
        positive("singular", self.singular)?;
        let t = self.thresholds();
        if t.singular > t.basis {
            return Err(CliError::Config(format!(
                "singular threshold {} exceeds basis threshold {}",
                t.singular, t.basis
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub grid_size: usize,
    pub potential: PotentialSpec,
    #[serde(default = "RationalHerglotz::zero")]
    pub f: RationalHerglotz,
    #[serde(rename = "F", default = "RationalHerglotz::zero")]
    pub big_f: RationalHerglotz,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub theta: Option<Vec<usize>>,
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_n_max() -> usize {
    20
}

/// Values given on the command line, each overriding the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub theta: Option<Vec<usize>>,
    pub n_max: Option<usize>,
    pub sizes: Option<Vec<usize>>,
    pub grid: Option<usize>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(mut self, o: &Overrides) -> Result<Self, CliError> {
        if let Some(t) = &o.theta {
            self.theta = Some(t.clone());
        }
        if let Some(n) = o.n_max {
            self.n_max = n;
        }
        if let Some(s) = &o.sizes {
            self.sizes = Some(s.clone());
        }
        if let Some(g) = o.grid {
            self.grid_size = g;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid_size < MIN_GRID {
            return Err(CliError::Config(format!("grid_size must be at least {MIN_GRID}, got {}", self.grid_size)));
        }
        if let Some(&bad) = self.theta.iter().flatten().find(|&&n| n > self.n_max) {
            return Err(CliError::Config(format!("theta index {bad} exceeds n_max = {}", self.n_max)));
        }
        if self.sizes.iter().flatten().any(|&s| s == 0) {
            return Err(CliError::Config("section sizes must be positive".into()));
        }
        self.tolerances.validate()
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        let s = self.potential.build(self.grid_size)?;
        Ok(Problem::build(s, self.f.clone(), self.big_f.clone())?)
    }

    /// The index set; an absent `theta` means the empty set.
    pub fn theta_set(&self, p: &Problem) -> Result<ThetaSet, CliError> {
        let indices = self.theta.clone().unwrap_or_default();
        Ok(ThetaSet::new(indices, p.n())?)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sizes.clone().unwrap_or_else(|| DEFAULT_SIZES.to_vec())
    }
}
