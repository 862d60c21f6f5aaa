//! Dense and banded linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is Hermitised first so that rounding asymmetry does not leak
/// into the iteration.
pub(crate) fn hermitian_eigh(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let h = hermitize(m);
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending. Diagonal input is read off
/// exactly.
pub(crate) fn hermitian_eigvals(m: &DMatrix<C64>) -> Vec<f64> {
    let mut values: Vec<f64> = if is_diagonal(m) {
        (0..m.nrows()).map(|i| m[(i, i)].re).collect()
    } else {
        hermitize(m).symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    values
}

pub(crate) fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub(crate) fn is_diagonal(m: &DMatrix<C64>) -> bool {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..n {
            if i != j && m[(i, j)] != C64::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub(crate) fn hermitian_fn(m: &DMatrix<C64>, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
    let n = m.nrows();
    if is_diagonal(m) {
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = C64::new(f(m[(i, i)].re), 0.0);
        }
        return out;
    }
    let (values, vectors) = hermitian_eigh(m);
    let scaled = DMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * f(values[j]));
    &scaled * vectors.adjoint()
}

/// Cholesky test for a Hermitian matrix: true if it factors with strictly
/// positive pivots. nalgebra's complex Cholesky accepts indefinite input,
/// so the factorisation is done here on a row-major lower triangle.
pub(crate) fn is_positive_definite(m: &DMatrix<C64>) -> bool {
    let n = m.nrows();
    let mut l = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..=i {
            let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
            let dot: C64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
            let s = m[(i, j)] - dot;
            if i == j {
                if !(s.re > 0.0) {
                    return false;
                }
                l[i * n + i] = C64::new(s.re.sqrt(), 0.0);
            } else {
                l[i * n + j] = s / l[j * n + j].re;
            }
        }
    }
    true
}

/// Largest and smallest singular value of a dense matrix.
pub(crate) fn singular_range(m: &DMatrix<C64>) -> (f64, f64) {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    (max, min)
}

/// LU factorisation of a square banded matrix without pivoting.
///
/// Storage is row-wise: row `i` keeps columns `i - lower ..= i + upper`.
/// Used for shifted generators `z I - h A` with `Re z > 0`; those are
/// column diagonally dominant for GKLS population and coherence sectors,
/// and the factorisation reports a tiny pivot instead of dividing by it.
#[derive(Debug, Clone)]
pub(crate) struct BandedLu {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<C64>,
}

impl BandedLu {
    /// Factors `shift * I - scale * a` where `a` is given by its banded
    /// entries. `entries` are `(row, col, value)` in local indices.
    pub(crate) fn factor_shifted(
        n: usize,
        lower: usize,
        upper: usize,
        entries: &[(usize, usize, C64)],
        shift: C64,
        scale: f64,
    ) -> Result<Self> {
        let width = lower + upper + 1;
        let mut data = vec![C64::new(0.0, 0.0); n * width];
        let idx = |i: usize, j: usize| i * width + (j + lower - i);
        for i in 0..n {
            data[idx(i, i)] = shift;
        }
        for &(i, j, v) in entries {
            data[idx(i, j)] -= v * scale;
        }
        let mut lu = Self {
            n,
            lower,
            upper,
            width,
            data,
        };
        lu.factor()?;
        Ok(lu)
    }

    fn at(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.lower - i)
    }

    fn factor(&mut self) -> Result<()> {
        let n = self.n;
        for k in 0..n {
            let pivot = self.data[self.at(k, k)];
            let row_scale = (k.saturating_sub(self.lower)..(k + self.upper + 1).min(n))
                .map(|j| self.data[self.at(k, j)].norm())
                .fold(0.0, f64::max);
            if pivot.norm() <= 1e-14 * row_scale.max(f64::MIN_POSITIVE) {
                return Err(Error::Numerical(format!(
                    "banded LU pivot {k} vanishes ({:.3e})",
                    pivot.norm()
                )));
            }
            let last_row = (k + self.lower).min(n - 1);
            let last_col = (k + self.upper).min(n - 1);
            for i in (k + 1)..=last_row {
                let ik = self.at(i, k);
                let factor = self.data[ik] / pivot;
                self.data[ik] = factor;
                if factor == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in (k + 1)..=last_col {
                    let kj = self.data[self.at(k, j)];
                    let ij = self.at(i, j);
                    self.data[ij] -= factor * kj;
                }
            }
        }
        Ok(())
    }

    #[allow(clippy::needless_range_loop)]
    pub(crate) fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        for i in 0..n {
            let start = i.saturating_sub(self.lower);
            let mut acc = b[i];
            for j in start..i {
                acc -= self.data[self.at(i, j)] * b[j];
            }
            b[i] = acc;
        }
        for i in (0..n).rev() {
            let end = (i + self.upper).min(n - 1);
            let mut acc = b[i];
            for j in (i + 1)..=end {
                acc -= self.data[self.at(i, j)] * b[j];
            }
            b[i] = acc / self.data[self.at(i, i)];
        }
    }
}

/// Partial-fraction form of the three-stage Radau IIA stability function,
/// the (2,3) Pade approximant of `exp(z)`:
///
/// `R(z) = (1 + 2z/5 + z^2/20) / (1 - 3z/5 + 3z^2/20 - z^3/60)
///       = sum_j residue_j / (pole_j - z)`.
///
/// It is L-stable (`R(-inf) = 0`) and fifth-order accurate.
pub(crate) fn radau_partial_fractions() -> [(C64, C64); 3] {
    // Poles are the roots of the denominator, equivalently of
    // z^3 - 9 z^2 + 36 z - 60.
    let coeffs = [-60.0, 36.0, -9.0];
    let companion = DMatrix::from_row_slice(
        3,
        3,
        &[0.0, 0.0, -coeffs[0], 1.0, 0.0, -coeffs[1], 0.0, 1.0, -coeffs[2]],
    );
    let roots = companion.complex_eigenvalues();
    let num = |z: C64| C64::new(1.0, 0.0) + z * 0.4 + z * z * 0.05;
    let den_prime = |z: C64| C64::new(-0.6, 0.0) + z * 0.3 - z * z * 0.05;
    let mut out = [(C64::new(0.0, 0.0), C64::new(0.0, 0.0)); 3];
    for (slot, root) in out.iter_mut().zip(roots.iter()) {
        // R(z) = sum r_j / (z - q_j) with r_j = P(q_j)/Q'(q_j); flip the sign
        // so that each term reads residue / (pole - z).
        let residue = -num(*root) / den_prime(*root);
        *slot = (*root, residue);
    }
    out
}

pub(crate) fn vec_norm(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
