//! Classical birth-death process for the occupation of the pumped
//! oscillator:
//!
//! `dP_n/dt = gd (n+1) P_{n+1} + gu n P_{n-1} - [gd n + gu (n+1)] P_n`.
//!
//! The state space is truncated at `N_max = probs.len() - 1` with no birth
//! out of the top level, which is exactly what the truncated quantum
//! generator does to its diagonal.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gkls::validate_grid;

/// Largest probability allowed on the top level.
pub const TOP_LEVEL_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirthDeathState {
    pub probs: Vec<f64>,
    pub t: f64,
}

impl BirthDeathState {
    pub fn new(probs: Vec<f64>, t: f64) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDimension(format!(
                "birth-death truncation needs at least 2 levels, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !(*p >= -1e-12) || !p.is_finite()) {
            return Err(Error::NotAState("probabilities must be non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NotAState(format!("probabilities sum to {total}")));
        }
        Ok(Self { probs, t })
    }

    /// All weight on level `n` of a truncation with `levels` levels.
    pub fn point(levels: usize, n: usize, t: f64) -> Result<Self> {
        if n >= levels {
            return Err(Error::InvalidParameter(format!(
                "level {n} outside a truncation of {levels} levels"
            )));
        }
        let mut probs = vec![0.0; levels];
        probs[n] = 1.0;
        Self::new(probs, t)
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| (n as f64 - m).powi(2) * p)
            .sum()
    }
}

/// Rate matrix `Q` with `dP/dt = Q P`.
fn rate_matrix(levels: usize, gamma_up: f64, gamma_down: f64) -> DMatrix<f64> {
    let top = levels - 1;
    let mut q = DMatrix::zeros(levels, levels);
    for n in 0..levels {
        let birth = if n < top { gamma_up * (n + 1) as f64 } else { 0.0 };
        let death = gamma_down * n as f64;
        q[(n, n)] = -(birth + death);
        if n < top {
            q[(n + 1, n)] = birth;
        }
        if n > 0 {
            q[(n - 1, n)] = death;
        }
    }
    q
}

/// Distributions at every time of `times` (the first must equal `p0.t`).
pub fn birth_death_evolve(
    p0: &BirthDeathState,
    gamma_up: f64,
    gamma_down: f64,
    times: &[f64],
) -> Result<Vec<BirthDeathState>> {
    validate_grid(times)?;
    for (name, r) in [("gamma_up", gamma_up), ("gamma_down", gamma_down)] {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{name} must be finite and non-negative, got {r}"
            )));
        }
    }
    if (times[0] - p0.t).abs() > 1e-12 * (1.0 + p0.t.abs()) {
        return Err(Error::InvalidGrid(format!(
            "grid starts at {} but the initial state is at {}",
            times[0], p0.t
        )));
    }
    let levels = p0.probs.len();
    let q = rate_matrix(levels, gamma_up, gamma_down);
    let mut cached: Option<(f64, DMatrix<f64>)> = None;
    let mut p = DVector::from_column_slice(&p0.probs);
    let mut out = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        if k > 0 {
            let dt = t - times[k - 1];
            let reuse = matches!(&cached, Some((h, _)) if (h - dt).abs() <= 1e-14 * dt);
            if !reuse {
                cached = Some((dt, (&q * dt).exp()));
            }
            p = &cached.as_ref().expect("set above").1 * p;
        }
        let top = p[levels - 1];
        if top > TOP_LEVEL_GUARD {
            return Err(Error::TruncationOverflow { time: t, population: top });
        }
        out.push(BirthDeathState {
            probs: p.iter().copied().collect(),
            t,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_without_rates() {
        let p0 = BirthDeathState::new(vec![0.2, 0.5, 0.3, 0.0], 0.0).unwrap();
        let out = birth_death_evolve(&p0, 0.0, 0.0, &[0.0, 1.0, 2.5]).unwrap();
        for s in &out {
            assert_eq!(s.probs, p0.probs);
        }
    }

    #[test]
    fn single_decay() {
        let p0 = BirthDeathState::point(10, 1, 0.0).unwrap();
        let out = birth_death_evolve(&p0, 0.0, 1.0, &[0.0, 1.0]).unwrap();
        assert!((out[1].probs[1] - (-1f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn mean_growth_law() {
        let (up, down) = (0.3, 0.5);
        let p0 = BirthDeathState::point(80, 2, 0.0).unwrap();
        let times = [0.0, 0.5, 1.0];
        let out = birth_death_evolve(&p0, up, down, &times).unwrap();
        let n0: f64 = 2.0;
        for s in &out {
            let g = up - down;
            let expected = (g * s.t).exp() * n0 + (g * s.t).exp_m1() * up / g;
            assert!((s.mean() - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn overflow_guard() {
        let p0 = BirthDeathState::point(6, 3, 0.0).unwrap();
        assert!(matches!(
            birth_death_evolve(&p0, 1.0, 0.1, &[0.0, 1.0]),
            Err(Error::TruncationOverflow { .. })
        ));
    }
}
