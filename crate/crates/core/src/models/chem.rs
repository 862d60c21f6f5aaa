//! Quantum oscillator pumped by a chemical reaction.
//!
//! `H = omega a^dag a` with damping `(a, gamma_down)`, pumping
//! `(a^dag, gamma_up)` and pure dephasing `(a^dag a, 2 Gamma)`. When the
//! reaction chemistry is supplied the rate ratio must match
//! `exp(-beta dG)`, `dG = omega + mu_C - mu_A - mu_B`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gkls::{GklsGenerator, LindbladTerm};
use crate::opcore::{fock_annihilation, number_operator, Operator};

/// Allowed deviation of `gamma_up / gamma_down` from `exp(-beta dG)`.
pub const CHEMISTRY_TOLERANCE: f64 = 1e-10;

pub const REACTION_BATH: &str = "reaction";
pub const DEPHASING_BATH: &str = "dephasing";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Chemistry {
    pub beta: f64,
    pub mu_a: f64,
    pub mu_b: f64,
    pub mu_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChemSpec {
    pub omega: f64,
    pub gamma_up: f64,
    pub gamma_down: f64,
    #[serde(default)]
    pub decoherence: f64,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub chemistry: Option<Chemistry>,
}

fn default_dim() -> usize {
    60
}

/// Free energy released per reaction event.
pub fn reaction_free_energy(omega: f64, chemistry: &Chemistry) -> f64 {
    omega + chemistry.mu_c - chemistry.mu_a - chemistry.mu_b
}

impl ChemSpec {
    pub fn new(omega: f64, gamma_up: f64, gamma_down: f64) -> Self {
        Self {
            omega,
            gamma_up,
            gamma_down,
            decoherence: 0.0,
            dim: default_dim(),
            chemistry: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidDimension(format!(
                "oscillator truncation needs at least 2 levels, got {}",
                self.dim
            )));
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidParameter("omega must be finite".into()));
        }
        for (name, r) in [
            ("gamma_up", self.gamma_up),
            ("gamma_down", self.gamma_down),
            ("decoherence", self.decoherence),
        ] {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {r}"
                )));
            }
        }
        if let Some(chem) = &self.chemistry {
            let expected = (-chem.beta * reaction_free_energy(self.omega, chem)).exp();
            let ratio = self.gamma_up / self.gamma_down;
            if !((ratio - expected).abs() < CHEMISTRY_TOLERANCE) {
                return Err(Error::DetailedBalanceViolation { ratio, expected });
            }
        }
        Ok(())
    }

    /// `gamma_up - gamma_down`, the growth rate of the mean occupation.
    pub fn net_gain(&self) -> f64 {
        self.gamma_up - self.gamma_down
    }
}

pub fn build_chem_generator(spec: &ChemSpec) -> Result<GklsGenerator> {
    spec.validate()?;
    let a = fock_annihilation(spec.dim)?;
    let n = number_operator(spec.dim)?;
    let h = &n * spec.omega;
    let mut terms = vec![
        LindbladTerm::new(a.clone(), spec.gamma_down, REACTION_BATH)?,
        LindbladTerm::new(a.adjoint(), spec.gamma_up, REACTION_BATH)?,
    ];
    if spec.decoherence > 0.0 {
        terms.push(LindbladTerm::new(n, 2.0 * spec.decoherence, DEPHASING_BATH)?);
    }
    GklsGenerator::new(h, terms)
}

/// Mean energy `E(t)` from `E(0) = e0`; linear growth when the rates are
/// equal.
pub fn analytic_energy(spec: &ChemSpec, e0: f64, t: f64) -> f64 {
    let gain = spec.net_gain();
    if gain == 0.0 {
        return e0 + spec.omega * spec.gamma_up * t;
    }
    let growth = (gain * t).exp();
    growth * e0 + (gain * t).exp_m1() * spec.omega * spec.gamma_up / gain
}

/// Mean amplitude `<a>(t) = exp((gain / 2 - Gamma) t - i omega t) alpha0`.
pub fn analytic_amplitude(spec: &ChemSpec, alpha0: Complex64, t: f64) -> Complex64 {
    let rate = 0.5 * spec.net_gain() - spec.decoherence;
    alpha0 * Complex64::new(rate * t, -spec.omega * t).exp()
}

/// Asymptotic ratio of ergotropy to energy for an amplified coherent state.
pub fn storage_efficiency(alpha0: Complex64, gamma_up: f64, gamma_down: f64) -> Result<f64> {
    if !(gamma_up > gamma_down) {
        return Err(Error::NotAmplifying {
            gamma_up,
            gamma_down,
        });
    }
    let coherent = alpha0.norm_sqr();
    Ok(coherent / (coherent + gamma_up / (gamma_up - gamma_down)))
}

/// `omega <a^dag a>` of a truncated state, the oscillator energy.
pub fn oscillator_energy(spec: &ChemSpec, rho: &crate::opcore::DensityMatrix) -> Result<f64> {
    let n: Operator = number_operator(spec.dim)?;
    Ok(spec.omega * rho.expectation(&n).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gkls::stationary_state;
    use crate::tolerance::Tolerances;

    #[test]
    fn free_energy_example() {
        let chem = Chemistry {
            beta: 0.7,
            mu_a: 2.0,
            mu_b: 1.5,
            mu_c: 0.5,
        };
        assert_eq!(reaction_free_energy(1.0, &chem), -2.0);
        let mut spec = ChemSpec::new(1.0, (1.4f64).exp(), 1.0);
        spec.chemistry = Some(chem);
        spec.validate().unwrap();
        spec.gamma_up *= 1.001;
        assert!(matches!(
            spec.validate(),
            Err(Error::DetailedBalanceViolation { .. })
        ));
    }

    #[test]
    fn thermal_occupation() {
        let mut spec = ChemSpec::new(1.0, 0.25, 1.0);
        spec.dim = 40;
        let gen = build_chem_generator(&spec).unwrap();
        let rho = stationary_state(&gen, &Tolerances::default()).unwrap();
        let n = oscillator_energy(&spec, &rho).unwrap();
        assert!((n - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn energy_and_amplitude_formulas() {
        let spec = ChemSpec::new(1.0, 0.5, 0.25);
        assert_eq!(analytic_energy(&spec, 1.7, 0.0), 1.7);
        assert!((analytic_energy(&spec, 0.0, 1.0) - 0.568051).abs() < 1e-6);
        let cold = ChemSpec::new(1.0, 0.25, 0.5);
        assert!((analytic_energy(&cold, 0.3, 200.0) - 1.0).abs() < 1e-12);
        let flat = ChemSpec::new(2.0, 0.5, 0.5);
        assert!((analytic_energy(&flat, 1.0, 3.0) - 4.0).abs() < 1e-15);

        let amp = ChemSpec::new(1.0, 0.3, 0.1);
        let a = analytic_amplitude(&amp, Complex64::new(2.0, 0.0), 1.0);
        assert!((a.norm() - 2.0 * 0.1f64.exp()).abs() < 1e-12);
        assert!((a.arg() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn efficiency_examples() {
        let eta = storage_efficiency(Complex64::new(3.0, 0.0), 1.0, 0.5).unwrap();
        assert!((eta - 9.0 / 11.0).abs() < 1e-15);
        assert_eq!(storage_efficiency(Complex64::new(0.0, 0.0), 1.0, 0.5).unwrap(), 0.0);
        assert!(matches!(
            storage_efficiency(Complex64::new(1.0, 0.0), 0.5, 0.5),
            Err(Error::NotAmplifying { .. })
        ));
    }
}
