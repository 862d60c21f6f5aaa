//! Diagonal multi-level systems coupled to thermal baths through individual
//! level transitions.
//!
//! The drive shifts level `i` by `xi * drive[i]`; every transition rebuilds
//! its thermal pair at the instantaneous Bohr frequency, so each member of
//! the family keeps detailed balance with its own baths.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gkls::{thermal_pair, GeneratorFamily, GklsGenerator, LindbladTerm};
use crate::opcore::Operator;
use crate::thermo::BathAssignment;

/// Operator dimension cap for level models.
pub const MAX_LEVELS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transition {
    pub lower: usize,
    pub upper: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelBath {
    pub label: String,
    pub beta: f64,
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelsSpec {
    pub energies: Vec<f64>,
    /// Diagonal of the drive observable; zero when absent.
    #[serde(default)]
    pub drive: Vec<f64>,
    pub baths: Vec<LevelBath>,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "default_frequency")]
    pub frequency: f64,
}

fn default_frequency() -> f64 {
    1.0
}

impl LevelsSpec {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    fn drive_diagonal(&self) -> Vec<f64> {
        if self.drive.is_empty() {
            vec![0.0; self.dim()]
        } else {
            self.drive.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if !(2..=MAX_LEVELS).contains(&dim) {
            return Err(Error::InvalidDimension(format!(
                "level count must lie in [2, {MAX_LEVELS}], got {dim}"
            )));
        }
        if self.energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter("energies must be finite".into()));
        }
        if !self.drive.is_empty() && self.drive.len() != dim {
            return Err(Error::ShapeError {
                expected: format!("{dim} drive entries"),
                found: format!("{}", self.drive.len()),
            });
        }
        if self.baths.is_empty() {
            return Err(Error::InvalidParameter("at least one bath is required".into()));
        }
        for bath in &self.baths {
            if !bath.beta.is_finite() || bath.beta < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "bath '{}': inverse temperature must be finite and non-negative",
                    bath.label
                )));
            }
            for t in &bath.transitions {
                if t.lower >= dim || t.upper >= dim || t.lower == t.upper {
                    return Err(Error::InvalidParameter(format!(
                        "bath '{}': transition {} -> {} is not between two distinct levels",
                        bath.label, t.upper, t.lower
                    )));
                }
                if !(t.rate >= 0.0) || !t.rate.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "bath '{}': rate must be finite and non-negative",
                        bath.label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self, xi: f64) -> Result<Operator> {
        let d = self.drive_diagonal();
        let levels: Vec<f64> = self.energies.iter().zip(&d).map(|(e, m)| e + xi * m).collect();
        Operator::diagonal(&levels)
    }

    pub fn drive_operator(&self) -> Result<Operator> {
        Operator::diagonal(&self.drive_diagonal())
    }

    fn terms(&self, xi: f64) -> Result<Vec<LindbladTerm>> {
        let h = self.hamiltonian(xi)?;
        let d = self.drive_diagonal();
        let level = |i: usize| self.energies[i] + xi * d[i];
        let mut terms = Vec::new();
        for bath in &self.baths {
            for t in &bath.transitions {
                let lowering = Operator::ket_bra(self.dim(), t.lower, t.upper)?;
                let bohr = level(t.upper) - level(t.lower);
                terms.extend(thermal_pair(&h, &lowering, t.rate, bohr, bath.beta, &bath.label)?);
            }
        }
        Ok(terms)
    }

    /// The undriven generator.
    pub fn generator(&self) -> Result<GklsGenerator> {
        self.validate()?;
        GklsGenerator::new(self.hamiltonian(0.0)?, self.terms(0.0)?)
    }

    pub fn family(&self) -> Result<GeneratorFamily> {
        self.validate()?;
        let spec = self.clone();
        GeneratorFamily::new(
            self.hamiltonian(0.0)?,
            self.drive_operator()?,
            self.amplitude,
            self.frequency,
            Arc::new(move |xi| spec.terms(xi)),
        )
    }

    pub fn bath_assignments(&self) -> Result<Vec<BathAssignment>> {
        let gen = self.generator()?;
        let betas: Vec<(&str, f64)> = self.baths.iter().map(|b| (b.label.as_str(), b.beta)).collect();
        BathAssignment::from_labels(&gen, &betas)
    }

    /// Random connected model: `dim` levels in `[0, 2)`, a chain of
    /// transitions covering all levels plus a few extra ones, spread over
    /// `n_baths` baths with inverse temperatures in `[0.2, 2)` and rates in
    /// `[0.2, 1.2)`. The drive diagonal is drawn from `[-1, 1)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_baths: usize) -> Result<Self> {
        if n_baths == 0 {
            return Err(Error::InvalidParameter("at least one bath is required".into()));
        }
        let energies: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..2.0)).collect();
        let drive: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut baths: Vec<LevelBath> = (0..n_baths)
            .map(|k| LevelBath {
                label: format!("bath{k}"),
                beta: rng.gen_range(0.2..2.0),
                transitions: Vec::new(),
            })
            .collect();
        let mut add = |rng: &mut R, a: usize, b: usize| {
            let (lower, upper) = if energies[a] <= energies[b] { (a, b) } else { (b, a) };
            let k = rng.gen_range(0..n_baths);
            baths[k].transitions.push(Transition {
                lower,
                upper,
                rate: rng.gen_range(0.2..1.2),
            });
        };
        for i in 1..dim {
            add(rng, i - 1, i);
        }
        for _ in 0..dim / 2 {
            let a = rng.gen_range(0..dim);
            let b = rng.gen_range(0..dim);
            if a != b {
                add(rng, a, b);
            }
        }
        let spec = Self {
            energies,
            drive,
            baths,
            amplitude: 0.1,
            frequency: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }
}
