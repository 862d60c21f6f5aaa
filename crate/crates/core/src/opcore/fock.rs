//! Bosonic ladder operators on a truncated Fock space and fermionic modes
//! through a Jordan-Wigner sign string.

use nalgebra::DVector;

use super::density::DensityMatrix;
use super::operator::{Operator, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Largest number of fermionic modes; the Fock space has `2^n` states.
pub const MAX_FERMION_MODES: usize = 12;

/// Annihilation operator `a|n> = sqrt(n)|n-1>` on `{|0>, ..., |dim-1>}`.
pub fn fock_annihilation(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "truncated Fock space needs at least 2 levels, got {dim}"
        )));
    }
    Ok(Operator::from_fn(dim, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })?
    .with_label("a"))
}

/// `a^dag a = diag(0, 1, ..., dim-1)`, built exactly.
pub fn number_operator(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "truncated Fock space needs at least 2 levels, got {dim}"
        )));
    }
    let levels: Vec<f64> = (0..dim).map(|n| n as f64).collect();
    Ok(Operator::diagonal(&levels)?.with_label("N"))
}

/// Annihilation operators `c_0, ..., c_{n-1}` on `2^n` states.
///
/// Mode `j` is the `j`-th tensor factor counted from the left (most
/// significant bit of the basis index), local state `|0>` is empty, and
/// `c_j = Z x ... x Z x s x I x ... x I` with `s = |0><1|`, `Z = diag(1, -1)`.
/// Callers fix the physical mode order through the order of the factors.
pub fn fermion_modes(n_modes: usize) -> Result<Vec<Operator>> {
    if n_modes == 0 || n_modes > MAX_FERMION_MODES {
        return Err(Error::InvalidDimension(format!(
            "fermion mode count must lie in [1, {MAX_FERMION_MODES}], got {n_modes}"
        )));
    }
    let dim = 1usize << n_modes;
    let mut modes = Vec::with_capacity(n_modes);
    for j in 0..n_modes {
        // Bit for mode j in the basis index.
        let bit = 1usize << (n_modes - 1 - j);
        let higher_mask = !((bit << 1) - 1) & (dim - 1);
        let op = Operator::from_fn(dim, |row, col| {
            // c_j maps |col> (mode j occupied) to |row> = |col> with bit cleared.
            if col & bit != 0 && row == col ^ bit {
                let parity = (col & higher_mask).count_ones();
                if parity.is_multiple_of(2) {
                    ONE
                } else {
                    -ONE
                }
            } else {
                ZERO
            }
        })?;
        modes.push(op.with_label(format!("c{j}")));
    }
    Ok(modes)
}

/// Occupation `n_j` of each mode in basis state `index` for `n_modes` modes.
pub fn mode_occupations(index: usize, n_modes: usize) -> Vec<bool> {
    (0..n_modes)
        .map(|j| index & (1usize << (n_modes - 1 - j)) != 0)
        .collect()
}

/// Truncated and renormalised coherent state `|alpha>`.
pub fn coherent_state(dim: usize, alpha: C64) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "truncated Fock space needs at least 2 levels, got {dim}"
        )));
    }
    let mut amp = DVector::from_element(dim, ZERO);
    amp[0] = ONE;
    for n in 1..dim {
        amp[n] = amp[n - 1] * alpha / (n as f64).sqrt();
    }
    DensityMatrix::pure(&amp)
}
