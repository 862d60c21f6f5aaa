//! Numerical tolerances shared by the solvers.
//!
//! Defaults are strict enough to catch vectorisation and sign-convention
//! bugs; every field can be overridden from a scenario configuration.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Unit-trace check on density matrices.
    pub trace: f64,
    /// Max |X - X^dag| accepted for density matrices.
    pub hermiticity: f64,
    /// Max |H - H^dag| accepted for Hamiltonians and observables.
    pub hamiltonian_hermiticity: f64,
    /// Smallest eigenvalue accepted for a density matrix is `-positivity`.
    pub positivity: f64,
    /// Generator-image norm below which a state counts as stationary.
    pub stationarity: f64,
    /// Singular values below `nullspace * max(1, sigma_max)` span the kernel.
    pub nullspace: f64,
    /// Eigenvalues below this floor make a matrix logarithm singular.
    pub log_floor: f64,
    /// Richardson estimate of the dU/dt discretisation error above which a
    /// trajectory grid is rejected.
    pub grid_error: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            trace: 1e-10,
            hermiticity: 1e-10,
            hamiltonian_hermiticity: 1e-12,
            positivity: 1e-9,
            stationarity: 1e-8,
            nullspace: 1e-9,
            log_floor: 1e-14,
            grid_error: 1e-3,
        }
    }
}
