//! Kinetic Monte Carlo sampling of the birth-death process.
//!
//! Trajectory `i` draws from `ChaCha8(seed)` on stream `i`, so the ensemble
//! is independent of how the work is scheduled.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gkls::validate_grid;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    /// Sample variance (divided by `n - 1`; zero for a single trajectory).
    pub variance: Vec<f64>,
    /// Standard error of the mean.
    pub stderr: Vec<f64>,
    /// Fraction of trajectories at `n = 0`.
    pub extinction_fraction: Vec<f64>,
    pub trajectories: usize,
}

/// Occupations at the sample times of one trajectory with birth rate
/// `gamma_up (n + 1)` and death rate `gamma_down n`.
fn sample_path(
    rng: &mut ChaCha8Rng,
    n0: u64,
    gamma_up: f64,
    gamma_down: f64,
    times: &[f64],
) -> Vec<u64> {
    let mut out = Vec::with_capacity(times.len());
    let mut n = n0;
    let mut t = times[0];
    let mut next = 0;
    loop {
        let birth = gamma_up * (n + 1) as f64;
        let death = gamma_down * n as f64;
        let total = birth + death;
        let wait = if total > 0.0 {
            -(1.0 - rng.gen::<f64>()).ln() / total
        } else {
            f64::INFINITY
        };
        let t_event = t + wait;
        while next < times.len() && times[next] < t_event {
            out.push(n);
            next += 1;
        }
        if next == times.len() {
            return out;
        }
        t = t_event;
        if rng.gen::<f64>() * total < birth {
            n += 1;
        } else {
            n -= 1;
        }
    }
}

/// Ensemble statistics over `trajectories` independent paths started at
/// `n0` and sampled on `times`.
pub fn gillespie_ensemble(
    n0: u64,
    gamma_up: f64,
    gamma_down: f64,
    times: &[f64],
    trajectories: usize,
    seed: u64,
) -> Result<EnsembleStats> {
    validate_grid(times)?;
    if trajectories == 0 {
        return Err(Error::InvalidParameter("at least one trajectory is required".into()));
    }
    for (name, r) in [("gamma_up", gamma_up), ("gamma_down", gamma_down)] {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{name} must be finite and non-negative, got {r}"
            )));
        }
    }
    let paths: Vec<Vec<u64>> = (0..trajectories)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            sample_path(&mut rng, n0, gamma_up, gamma_down, times)
        })
        .collect();
    let count = trajectories as f64;
    let mut stats = EnsembleStats {
        times: times.to_vec(),
        mean: Vec::with_capacity(times.len()),
        variance: Vec::with_capacity(times.len()),
        stderr: Vec::with_capacity(times.len()),
        extinction_fraction: Vec::with_capacity(times.len()),
        trajectories,
    };
    for k in 0..times.len() {
        let mean = paths.iter().map(|p| p[k] as f64).sum::<f64>() / count;
        let variance = if trajectories > 1 {
            paths.iter().map(|p| (p[k] as f64 - mean).powi(2)).sum::<f64>() / (count - 1.0)
        } else {
            0.0
        };
        let extinct = paths.iter().filter(|p| p[k] == 0).count() as f64 / count;
        stats.mean.push(mean);
        stats.stderr.push((variance / count).sqrt());
        stats.variance.push(variance);
        stats.extinction_fraction.push(extinct);
    }
    Ok(stats)
}
