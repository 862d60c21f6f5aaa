//! First and Second Law bookkeeping along a driven trajectory.
//!
//! Time derivatives of `U` and `S` are taken on the trajectory grid with
//! three-point Lagrange stencils: central in the interior, one-sided at the
//! two ends, second order everywhere. The grid is rejected when a
//! Richardson comparison with the doubled step says the `dU/dt` stencil
//! error exceeds the `grid_error` tolerance.

use serde::Serialize;

use super::entropy::{entropy_production, von_neumann_entropy};
use super::functionals::{heat_currents, instantaneous_power, internal_energy, BathAssignment};
use crate::error::{Error, Result};
use crate::gkls::{stationary_state, GeneratorFamily, Trajectory};
use crate::tolerance::Tolerances;

/// Thermodynamic record at one grid time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermoSample {
    pub t: f64,
    pub energy: f64,
    pub power: f64,
    pub heat_currents: Vec<f64>,
    pub heat_total: f64,
    pub entropy: f64,
    pub entropy_production: f64,
    /// `dU/dt - J + P`.
    pub first_law_residual: f64,
    /// `dS/dt - sum_k beta_k J_k`, non-negative up to discretisation error.
    pub second_law_residual: f64,
}

/// Derivative at `x[i]` from the quadratic through `(x[a], x[b], x[c])`.
fn lagrange_derivative(x: [f64; 3], y: [f64; 3], at: f64) -> f64 {
    let [x0, x1, x2] = x;
    let [y0, y1, y2] = y;
    y0 * (2.0 * at - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (2.0 * at - x0 - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (2.0 * at - x0 - x1) / ((x2 - x0) * (x2 - x1))
}

/// Second-order derivative of samples `y` on the grid `t` using every
/// `stride`-th point; returns values at the points `0, stride, 2 stride, ...`.
fn grid_derivative(t: &[f64], y: &[f64], stride: usize) -> Vec<f64> {
    let idx: Vec<usize> = (0..t.len()).step_by(stride).collect();
    let n = idx.len();
    (0..n)
        .map(|k| {
            let (a, b, c) = if k == 0 {
                (0, 1, 2)
            } else if k == n - 1 {
                (n - 3, n - 2, n - 1)
            } else {
                (k - 1, k, k + 1)
            };
            let (ia, ib, ic) = (idx[a], idx[b], idx[c]);
            lagrange_derivative([t[ia], t[ib], t[ic]], [y[ia], y[ib], y[ic]], t[idx[k]])
        })
        .collect()
}

/// Richardson estimate of the error of the stride-1 derivative: the stride-2
/// stencil has four times the leading error, so the difference is three
/// times the stride-1 error.
fn derivative_error_estimate(t: &[f64], y: &[f64]) -> Option<f64> {
    if t.len() < 7 {
        return None;
    }
    let fine = grid_derivative(t, y, 1);
    let coarse = grid_derivative(t, y, 2);
    Some(
        coarse
            .iter()
            .enumerate()
            .map(|(k, c)| (fine[2 * k] - c).abs() / 3.0)
            .fold(0.0, f64::max),
    )
}

/// Per-sample energy balance and entropy balance for a trajectory produced
/// by [`crate::gkls::evolve_driven`].
pub fn law_residuals(
    trajectory: &Trajectory,
    family: &GeneratorFamily,
    baths: &[BathAssignment],
    tol: &Tolerances,
) -> Result<Vec<ThermoSample>> {
    let xi = trajectory.drive_samples().ok_or_else(|| {
        Error::InvalidParameter("trajectory carries no drive samples; use evolve_driven".into())
    })?;
    let t = trajectory.times();
    if t.len() < 3 {
        return Err(Error::InvalidGrid(
            "law residuals need at least three grid points".into(),
        ));
    }
    let n = t.len();
    let mut energy = Vec::with_capacity(n);
    let mut entropy = Vec::with_capacity(n);
    let mut partial = Vec::with_capacity(n);
    for k in 0..n {
        let rho = &trajectory.states()[k];
        let h = family.hamiltonian(xi[k]);
        let gen = family.generator(xi[k])?;
        let currents = heat_currents(&gen, baths, rho, &h)?;
        let dh_dt = family.drive() * family.xi_rate(t[k]);
        let power = instantaneous_power(rho, &dh_dt)?;
        let rho_bar = stationary_state(&gen, tol)?;
        let sigma = entropy_production(&gen, rho, &rho_bar, tol)?;
        energy.push(internal_energy(rho, &h)?);
        entropy.push(von_neumann_entropy(rho));
        partial.push((currents, power, sigma));
    }
    if let Some(estimate) = derivative_error_estimate(t, &energy) {
        if estimate > tol.grid_error {
            return Err(Error::GridTooCoarse {
                estimate,
                limit: tol.grid_error,
            });
        }
    }
    let du = grid_derivative(t, &energy, 1);
    let ds = grid_derivative(t, &entropy, 1);
    Ok(partial
        .into_iter()
        .enumerate()
        .map(|(k, (currents, power, sigma))| {
            let weighted: f64 = baths
                .iter()
                .zip(&currents.per_bath)
                .map(|(b, j)| b.beta * j)
                .sum();
            ThermoSample {
                t: t[k],
                energy: energy[k],
                power,
                heat_total: currents.total,
                first_law_residual: du[k] - currents.total + power,
                second_law_residual: ds[k] - weighted,
                heat_currents: currents.per_bath,
                entropy: entropy[k],
                entropy_production: sigma,
            }
        })
        .collect())
}
