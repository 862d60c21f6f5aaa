//! Two-band photovoltaic cell.
//!
//! Conduction modes `c_k` and valence modes `v_l` share one Jordan-Wigner
//! Fock space (conduction modes first). Phonons at `beta` relax electrons
//! within each band, photons at `beta_photon` move them across the gap. The
//! collective charge oscillation couples to the conduction-band occupation
//! `N_c`, shifting every conduction level (and with it every interband Bohr
//! frequency) by `xi`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gkls::{stationary_state_in_sectors, thermal_pair, GeneratorFamily, GklsGenerator, LindbladTerm};
use crate::opcore::{fermion_modes, mode_occupations, DensityMatrix, Operator, MAX_FERMION_MODES};
use crate::tolerance::Tolerances;

pub const PHONON_BATH: &str = "phonon";
pub const PHOTON_BATH: &str = "photon";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PvSpec {
    pub conduction_energies: Vec<f64>,
    pub valence_energies: Vec<f64>,
    /// Ambient (phonon) inverse temperature.
    pub beta: f64,
    /// Effective inverse temperature of the photon bath.
    pub beta_photon: f64,
    /// `intra_conduction[k][k']`: rate of `k -> k'` within the conduction band.
    pub intra_conduction: Vec<Vec<f64>>,
    pub intra_valence: Vec<Vec<f64>>,
    /// `inter[k][l]`: rate of the emission `c_k -> v_l`.
    pub inter: Vec<Vec<f64>>,
    pub mu_c: f64,
    pub mu_v: f64,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "default_frequency")]
    pub frequency: f64,
}

fn default_frequency() -> f64 {
    1.0
}

fn fermi(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (x.exp() + 1.0)
    }
}

fn check_rates(name: &str, rates: &[Vec<f64>], rows: usize, cols: usize) -> Result<()> {
    if rates.len() != rows || rates.iter().any(|r| r.len() != cols) {
        return Err(Error::ShapeError {
            expected: format!("{name}: {rows} x {cols}"),
            found: format!(
                "{} rows of lengths {:?}",
                rates.len(),
                rates.iter().map(Vec::len).collect::<Vec<_>>()
            ),
        });
    }
    if rates.iter().flatten().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{name}: rates must be finite and non-negative"
        )));
    }
    Ok(())
}

impl PvSpec {
    /// Degenerate bands at `+-omega_g / 2` with unit intraband rates,
    /// interband rates `0.01`, `beta = 1` and `beta_photon = 0.3`.
    pub fn degenerate(n_conduction: usize, n_valence: usize, omega_g: f64) -> Self {
        let rate = |rows: usize, cols: usize, x: f64| vec![vec![x; cols]; rows];
        let mut intra_c = rate(n_conduction, n_conduction, 1.0);
        let mut intra_v = rate(n_valence, n_valence, 1.0);
        for (k, row) in intra_c.iter_mut().enumerate() {
            row[k] = 0.0;
        }
        for (l, row) in intra_v.iter_mut().enumerate() {
            row[l] = 0.0;
        }
        Self {
            conduction_energies: vec![0.5 * omega_g; n_conduction],
            valence_energies: vec![-0.5 * omega_g; n_valence],
            beta: 1.0,
            beta_photon: 0.3,
            intra_conduction: intra_c,
            intra_valence: intra_v,
            inter: rate(n_conduction, n_valence, 0.01),
            mu_c: 0.0,
            mu_v: 0.0,
            amplitude: 0.1,
            frequency: 1.0,
        }
    }

    pub fn n_conduction(&self) -> usize {
        self.conduction_energies.len()
    }

    pub fn n_valence(&self) -> usize {
        self.valence_energies.len()
    }

    pub fn n_modes(&self) -> usize {
        self.n_conduction() + self.n_valence()
    }

    /// `min E_c - max E_v`.
    pub fn band_gap(&self) -> f64 {
        let c = self.conduction_energies.iter().copied().fold(f64::INFINITY, f64::min);
        let v = self.valence_energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        c - v
    }

    /// `eV = mu_c - mu_v`.
    pub fn voltage(&self) -> f64 {
        self.mu_c - self.mu_v
    }

    /// Same cell at voltage `v`, keeping `(mu_c + mu_v) / 2` fixed.
    pub fn with_voltage(&self, v: f64) -> Self {
        let mid = 0.5 * (self.mu_c + self.mu_v);
        Self {
            mu_c: mid + 0.5 * v,
            mu_v: mid - 0.5 * v,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (nc, nv) = (self.n_conduction(), self.n_valence());
        if nc == 0 || nv == 0 || nc + nv > MAX_FERMION_MODES {
            return Err(Error::InvalidDimension(format!(
                "need at least one mode per band and at most {MAX_FERMION_MODES} in total, got {nc} + {nv}"
            )));
        }
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        if !finite(&self.conduction_energies) || !finite(&self.valence_energies) {
            return Err(Error::InvalidParameter("band energies must be finite".into()));
        }
        if !(self.band_gap() > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "band gap must be positive, got {}",
                self.band_gap()
            )));
        }
        for (name, b) in [("beta", self.beta), ("beta_photon", self.beta_photon)] {
            if !b.is_finite() || b < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {b}"
                )));
            }
        }
        if !self.mu_c.is_finite() || !self.mu_v.is_finite() {
            return Err(Error::InvalidParameter("chemical potentials must be finite".into()));
        }
        check_rates("intra_conduction", &self.intra_conduction, nc, nc)?;
        check_rates("intra_valence", &self.intra_valence, nv, nv)?;
        check_rates("inter", &self.inter, nc, nv)?;
        Ok(())
    }

    /// Conduction and valence annihilation operators.
    fn modes(&self) -> Result<(Vec<Operator>, Vec<Operator>)> {
        let mut all = fermion_modes(self.n_modes())?;
        let valence = all.split_off(self.n_conduction());
        Ok((all, valence))
    }

    /// `N_c = sum_k c_k^dag c_k`.
    pub fn conduction_number(&self) -> Result<Operator> {
        let (c, _) = self.modes()?;
        Ok(number_sum(&c, None))
    }

    pub fn hamiltonian(&self, xi: f64) -> Result<Operator> {
        let (c, v) = self.modes()?;
        let shifted: Vec<f64> = self.conduction_energies.iter().map(|e| e + xi).collect();
        Ok(number_sum(&c, Some(&shifted)) + number_sum(&v, Some(&self.valence_energies)))
    }

    /// Intraband (phonon) terms only.
    pub fn intraband_terms(&self) -> Result<Vec<LindbladTerm>> {
        let (c, v) = self.modes()?;
        let h = self.hamiltonian(0.0)?;
        let mut terms = Vec::new();
        for (ops, energies, rates) in [
            (&c, &self.conduction_energies, &self.intra_conduction),
            (&v, &self.valence_energies, &self.intra_valence),
        ] {
            for (k, row) in rates.iter().enumerate() {
                for (kp, &rate) in row.iter().enumerate() {
                    if k == kp || rate == 0.0 {
                        continue;
                    }
                    let hop = &ops[kp].adjoint() * &ops[k];
                    let bohr = energies[k] - energies[kp];
                    terms.extend(thermal_pair(&h, &hop, rate, bohr, self.beta, PHONON_BATH)?);
                }
            }
        }
        Ok(terms)
    }

    fn interband_terms(&self, xi: f64) -> Result<Vec<LindbladTerm>> {
        let (c, v) = self.modes()?;
        let h = self.hamiltonian(xi)?;
        let mut terms = Vec::new();
        for (k, row) in self.inter.iter().enumerate() {
            for (l, &rate) in row.iter().enumerate() {
                if rate == 0.0 {
                    continue;
                }
                let emission = &v[l].adjoint() * &c[k];
                let bohr = self.conduction_energies[k] + xi - self.valence_energies[l];
                terms.extend(thermal_pair(
                    &h,
                    &emission,
                    rate,
                    bohr,
                    self.beta_photon,
                    PHOTON_BATH,
                )?);
            }
        }
        Ok(terms)
    }

    pub fn generator(&self, xi: f64) -> Result<GklsGenerator> {
        self.validate()?;
        let mut terms = self.intraband_terms()?;
        terms.extend(self.interband_terms(xi)?);
        GklsGenerator::new(self.hamiltonian(xi)?, terms)
    }

    pub fn family(&self) -> Result<GeneratorFamily> {
        self.validate()?;
        let spec = self.clone();
        let intra = self.intraband_terms()?;
        GeneratorFamily::new(
            self.hamiltonian(0.0)?,
            self.conduction_number()?,
            self.amplitude,
            self.frequency,
            Arc::new(move |xi| {
                let mut terms = intra.clone();
                terms.extend(spec.interband_terms(xi)?);
                Ok(terms)
            }),
        )
    }

    /// Fermi occupation of conduction mode `k` at `xi = 0`.
    pub fn conduction_occupation(&self, k: usize) -> f64 {
        fermi(self.beta * (self.conduction_energies[k] - self.mu_c))
    }

    pub fn valence_occupation(&self, l: usize) -> f64 {
        fermi(self.beta * (self.valence_energies[l] - self.mu_v))
    }

    /// `<N_c>` in the grand-canonical state at `xi = 0`.
    pub fn mean_conduction_number(&self) -> f64 {
        (0..self.n_conduction()).map(|k| self.conduction_occupation(k)).sum()
    }

    /// `sum_kl gamma_kl (1 - f_v(l)) f_c(k)`.
    pub fn emission_rate(&self) -> f64 {
        let mut total = 0.0;
        for (k, row) in self.inter.iter().enumerate() {
            for (l, &rate) in row.iter().enumerate() {
                total += rate * (1.0 - self.valence_occupation(l)) * self.conduction_occupation(k);
            }
        }
        total
    }
}

fn number_sum(ops: &[Operator], weights: Option<&[f64]>) -> Operator {
    let dim = ops[0].dim();
    let mut out = Operator::zeros(dim).expect("non-empty mode list");
    for (k, op) in ops.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[k]);
        out = out + (&op.adjoint() * op) * w;
    }
    out
}

/// Grand-canonical product state with conduction levels shifted by `xi`.
pub fn pv_grand_canonical(spec: &PvSpec, xi: f64) -> Result<DensityMatrix> {
    spec.validate()?;
    let n = spec.n_modes();
    let nc = spec.n_conduction();
    let exponent = |index: usize| -> f64 {
        mode_occupations(index, n)
            .iter()
            .enumerate()
            .filter(|(_, &occ)| occ)
            .map(|(j, _)| {
                if j < nc {
                    spec.conduction_energies[j] + xi - spec.mu_c
                } else {
                    spec.valence_energies[j - nc] - spec.mu_v
                }
            })
            .sum::<f64>()
            * spec.beta
    };
    let exps: Vec<f64> = (0..1usize << n).map(exponent).collect();
    let lowest = exps.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = exps.iter().map(|x| (-(x - lowest)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
    DensityMatrix::diagonal(&probs)
}

/// Stationary state of the full generator at `xi` in the charge sectors
/// weighted like the grand-canonical state.
pub fn pv_stationary_state(spec: &PvSpec, xi: f64, tol: &Tolerances) -> Result<DensityMatrix> {
    let reference = pv_grand_canonical(spec, xi)?;
    stationary_state_in_sectors(&spec.generator(xi)?, &reference, tol)
}

/// `eV_oc = omega_g (1 - beta_photon / beta)`.
pub fn open_circuit_voltage_from(omega_g: f64, beta: f64, beta_photon: f64) -> f64 {
    omega_g * (1.0 - beta_photon / beta)
}

pub fn open_circuit_voltage(spec: &PvSpec) -> f64 {
    open_circuit_voltage_from(spec.band_gap(), spec.beta, spec.beta_photon)
}

/// Closed-form average power
/// `g^2 beta <N_c> G (exp(beta ((1 - beta_photon / beta) omega_g - eV)) - 1)`.
pub fn analytic_power_formula(
    amplitude: f64,
    beta: f64,
    beta_photon: f64,
    omega_g: f64,
    voltage: f64,
    mean_conduction: f64,
    emission_rate: f64,
) -> f64 {
    let exponent = beta * (open_circuit_voltage_from(omega_g, beta, beta_photon) - voltage);
    amplitude.powi(2) * beta * mean_conduction * emission_rate * exponent.exp_m1()
}

/// Closed-form power of `spec` moved to voltage `v`.
pub fn pv_analytic_power(spec: &PvSpec, v: f64) -> f64 {
    let s = spec.with_voltage(v);
    analytic_power_formula(
        s.amplitude,
        s.beta,
        s.beta_photon,
        s.band_gap(),
        v,
        s.mean_conduction_number(),
        s.emission_rate(),
    )
}

/// High-frequency power `-(g^2 / 2) Tr(rho' L* N_c)` with `rho` the
/// grand-canonical state at voltage `v` and `rho'` its exact `xi`
/// derivative `-beta (N_c - <N_c>) rho`.
pub fn pv_ansatz_power(spec: &PvSpec, v: f64) -> Result<f64> {
    let s = spec.with_voltage(v);
    let rho = pv_grand_canonical(&s, 0.0)?;
    let n_c = s.conduction_number()?;
    let mean = rho.expectation(&n_c).re;
    let centred = &n_c - &(Operator::identity(n_c.dim())? * mean);
    let derivative = (&centred * rho.op()) * (-s.beta);
    let l_star_n = s.generator(0.0)?.apply_heisenberg(&n_c)?;
    Ok(-0.5 * s.amplitude.powi(2) * derivative.trace_product(&l_star_n).re)
}

/// `beta[omega] = ln(1 + 1/n) / omega`, the inverse temperature that gives
/// occupation `n` to a mode of frequency `omega`.
pub fn effective_inverse_temperature(n: f64, omega: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::ZeroOccupation(n));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mode frequency must be positive, got {omega}"
        )));
    }
    Ok((1.0 / n).ln_1p() / omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_temperature_examples() {
        assert!((effective_inverse_temperature(1.0, 1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(effective_inverse_temperature(1e12, 1.0).unwrap() < 1e-11);
        assert!(matches!(
            effective_inverse_temperature(0.0, 1.0),
            Err(Error::ZeroOccupation(_))
        ));
        for omega in [0.3_f64, 1.0, 4.0] {
            let beta = 0.7;
            let planck = 1.0 / ((beta * omega).exp() - 1.0);
            let b = effective_inverse_temperature(planck, omega).unwrap();
            assert!((b - beta).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_formula_arithmetic() {
        // Exponent 1 * ((1 - 0.3) * 10 - 5) = 2.
        let p = analytic_power_formula(0.1, 1.0, 0.3, 10.0, 5.0, 0.5, 0.01);
        assert!((p - 0.01 * 0.5 * 0.01 * 2f64.exp_m1()).abs() < 1e-18);
        assert!((p - 3.1945e-4).abs() < 1e-7);
    }

    #[test]
    fn open_circuit_limits() {
        assert_eq!(open_circuit_voltage_from(1.3, 2.0, 2.0), 0.0);
        assert_eq!(open_circuit_voltage_from(1.3, 2.0, 0.0), 1.3);
        let spec = PvSpec::degenerate(1, 1, 2.0);
        assert!(pv_analytic_power(&spec, open_circuit_voltage(&spec)).abs() < 1e-15);
    }

    #[test]
    fn grand_canonical_occupations() {
        let mut spec = PvSpec::degenerate(2, 1, 1.0);
        spec.conduction_energies = vec![0.5, 0.9];
        spec.mu_c = 0.2;
        let rho = pv_grand_canonical(&spec, 0.1).unwrap();
        let n_c = spec.conduction_number().unwrap();
        let expected: f64 = [0.5, 0.9]
            .iter()
            .map(|e| 1.0 / ((spec.beta * (e + 0.1 - 0.2)).exp() + 1.0))
            .sum();
        assert!((rho.expectation(&n_c).re - expected).abs() < 1e-14);
        let rho0 = pv_grand_canonical(&spec, 0.0).unwrap();
        assert!((rho0.expectation(&n_c).re - spec.mean_conduction_number()).abs() < 1e-14);
    }

    #[test]
    fn intraband_conserves_conduction_number() {
        let mut spec = PvSpec::degenerate(2, 2, 1.0);
        spec.conduction_energies = vec![0.5, 0.8];
        spec.valence_energies = vec![-0.5, -0.7];
        let h = spec.hamiltonian(0.0).unwrap();
        let gen = GklsGenerator::new(h, spec.intraband_terms().unwrap()).unwrap();
        let n_c = spec.conduction_number().unwrap();
        assert!(gen.apply_heisenberg(&n_c).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_gap() {
        let mut spec = PvSpec::degenerate(1, 1, 1.0);
        spec.valence_energies = vec![0.6];
        assert!(spec.validate().is_err());
    }
}
