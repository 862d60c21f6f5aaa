//! Quantum detailed balance with respect to the state-weighted inner
//! product `<X, Y> = Tr(rho X^dag Y)`.
//!
//! With `G = rho^T (x) I` the inner product reads `vec(X)^dag G vec(Y)`.
//! A superoperator `A` is self-adjoint for it iff `G^{1/2} A G^{-1/2}` is
//! Hermitian, and `G^{1/2}` is right multiplication by `rho^{1/2}`.

use serde::Serialize;

use super::generator::GklsGenerator;
use super::stationary::stationarity_residual;
use crate::error::{Error, Result};
use crate::opcore::{DensityMatrix, Operator, SuperOperator, C64};
use crate::tolerance::Tolerances;

/// Smallest eigenvalue accepted for a weight state.
pub const MIN_WEIGHT_EIGENVALUE: f64 = 1e-12;

fn ensure_faithful(rho: &DensityMatrix) -> Result<()> {
    let min = rho.min_eigenvalue();
    if min <= MIN_WEIGHT_EIGENVALUE {
        return Err(Error::SingularWeight {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// `Tr(rho_bar X^dag Y)`.
pub fn weighted_inner_product(x: &Operator, y: &Operator, rho_bar: &DensityMatrix) -> Result<C64> {
    x.ensure_same_dim(y)?;
    x.ensure_same_dim(rho_bar.op())?;
    ensure_faithful(rho_bar)?;
    Ok(rho_bar.op().trace_product(&(&x.adjoint() * y)))
}

/// Residuals of the three detailed-balance conditions on the Heisenberg
/// generator, all absolute Frobenius norms of the similarity-transformed
/// parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceReport {
    /// `|| D~ - D~^dag ||`: dissipative part self-adjoint.
    pub dissipator_hermiticity: f64,
    /// `|| K~ + K~^dag ||`: Hamiltonian part anti-self-adjoint.
    pub hamiltonian_antihermiticity: f64,
    /// `|| [K~, D~] ||`: the two parts commute.
    pub commutator: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl BalanceReport {
    pub fn max_residual(&self) -> f64 {
        self.dissipator_hermiticity
            .max(self.hamiltonian_antihermiticity)
            .max(self.commutator)
    }
}

/// Checks detailed balance of `gen` against its stationary state `rho_bar`;
/// `passed` compares every residual with `threshold`.
pub fn detailed_balance_report(
    gen: &GklsGenerator,
    rho_bar: &DensityMatrix,
    threshold: f64,
    tol: &Tolerances,
) -> Result<BalanceReport> {
    gen.hamiltonian().ensure_same_dim(rho_bar.op())?;
    let residual = stationarity_residual(&gen.schrodinger_super(), rho_bar)?;
    if residual > tol.stationarity {
        return Err(Error::NotStationary { residual });
    }
    ensure_faithful(rho_bar)?;
    let root = rho_bar.op().hermitian_fn(|x| x.max(0.0).sqrt());
    let inv_root = rho_bar.op().hermitian_fn(|x| 1.0 / x.sqrt());
    let g_half = SuperOperator::right_mul(&root);
    let g_inv_half = SuperOperator::right_mul(&inv_root);
    let transform = |a: &SuperOperator| -> Result<nalgebra::DMatrix<C64>> {
        g_half.compose(&a.compose(&g_inv_half)?)?.to_dense()
    };
    let k = transform(&gen.heisenberg_hamiltonian_super())?;
    let d = transform(&gen.heisenberg_dissipator_super())?;
    let dissipator_hermiticity = (&d - d.adjoint()).norm();
    let hamiltonian_antihermiticity = (&k + k.adjoint()).norm();
    let commutator = (&k * &d - &d * &k).norm();
    let passed = dissipator_hermiticity <= threshold
        && hamiltonian_antihermiticity <= threshold
        && commutator <= threshold;
    Ok(BalanceReport {
        dissipator_hermiticity,
        hamiltonian_antihermiticity,
        commutator,
        tolerance: threshold,
        passed,
    })
}
