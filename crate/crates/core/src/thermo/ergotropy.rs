//! Passive states and ergotropy.
//!
//! Only spectra enter the ergotropy: with energies `e_1 <= e_2 <= ...`,
//! energy-basis populations `p_i` and the eigenvalues `r_1 >= r_2 >= ...` of
//! the state, `W = sum_i e_i (p_i - r_i)`. When the Hamiltonian is diagonal
//! its basis is used directly (stable sort on energies), so degenerate
//! levels are filled in index order.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::opcore::{DensityMatrix, Operator, C64};
use crate::tolerance::Tolerances;

enum EnergyBasis {
    /// Diagonal Hamiltonian: basis index of the `k`-th lowest level.
    Permutation(Vec<usize>),
    /// Eigenvectors as columns.
    Dense(DMatrix<C64>),
}

/// Energies ascending with the matching eigenbasis.
fn energy_basis(h: &Operator) -> (Vec<f64>, EnergyBasis) {
    if h.is_diagonal() {
        let level = |i: usize| h.matrix()[(i, i)].re;
        let mut order: Vec<usize> = (0..h.dim()).collect();
        order.sort_by(|&a, &b| level(a).total_cmp(&level(b)));
        (order.iter().map(|&i| level(i)).collect(), EnergyBasis::Permutation(order))
    } else {
        let (e, v) = h.eigh();
        (e, EnergyBasis::Dense(v))
    }
}

fn descending_spectrum(rho: &DensityMatrix) -> Vec<f64> {
    let mut r = rho.eigenvalues();
    r.reverse();
    r
}

/// The passive state unitarily equivalent to `rho`: its eigenvalues in
/// decreasing order placed on the energy eigenvectors in increasing order.
pub fn passive_state(rho: &DensityMatrix, h: &Operator) -> Result<DensityMatrix> {
    rho.op().ensure_same_dim(h)?;
    h.ensure_hermitian(Tolerances::default().hamiltonian_hermiticity)?;
    let r = descending_spectrum(rho);
    let n = h.dim();
    let mat = match energy_basis(h).1 {
        EnergyBasis::Permutation(order) => {
            let mut m = DMatrix::zeros(n, n);
            for (k, &i) in order.iter().enumerate() {
                m[(i, i)] = C64::new(r[k], 0.0);
            }
            m
        }
        EnergyBasis::Dense(v) => {
            let scaled = DMatrix::from_fn(n, n, |i, j| v[(i, j)] * r[j]);
            &scaled * v.adjoint()
        }
    };
    Ok(DensityMatrix::from_trusted(Operator::new(mat)?))
}

/// `W = Tr(rho H) - Tr(rho_passive H) >= 0`.
pub fn ergotropy(rho: &DensityMatrix, h: &Operator) -> Result<f64> {
    rho.op().ensure_same_dim(h)?;
    h.ensure_hermitian(Tolerances::default().hamiltonian_hermiticity)?;
    let (energies, basis) = energy_basis(h);
    let r = descending_spectrum(rho);
    let populations: Vec<f64> = match basis {
        EnergyBasis::Permutation(order) => order.iter().map(|&i| rho.matrix()[(i, i)].re).collect(),
        EnergyBasis::Dense(v) => {
            let m = v.adjoint() * rho.matrix() * &v;
            (0..h.dim()).map(|i| m[(i, i)].re).collect()
        }
    };
    let w: f64 = energies
        .iter()
        .zip(populations.iter().zip(&r))
        .map(|(e, (p, q))| e * (p - q))
        .sum();
    // Rounding can leave a tiny negative value for passive input.
    let scale = energies.iter().map(|e| e.abs()).fold(0.0, f64::max);
    Ok(if w < 0.0 && w > -1e-12 * (1.0 + scale) {
        0.0
    } else {
        w
    })
}
