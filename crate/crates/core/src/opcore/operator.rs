use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix acting on a finite-dimensional Hilbert space.
///
/// Vectorisation is column stacking: the entry `X[i, j]` sits at position
/// `j * dim + i` of `vec(X)`. This matches nalgebra's column-major storage,
/// so `vectorize` is a plain copy.
#[derive(Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
    label: Option<String>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("dim", &self.dim())
            .field("label", &self.label)
            .field("entries", &self.mat)
            .finish()
    }
}

impl Operator {
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::ShapeError {
                expected: "square matrix".into(),
                found: format!("{}x{}", mat.nrows(), mat.ncols()),
            });
        }
        if mat.nrows() == 0 {
            return Err(Error::InvalidDimension("operator dimension must be positive".into()));
        }
        Ok(Self { mat, label: None })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::new(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_real(mat: &DMatrix<f64>) -> Result<Self> {
        Self::new(mat.map(|x| C64::new(x, 0.0)))
    }

    /// Real diagonal operator, e.g. a Hamiltonian in its eigenbasis.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(dim, dim))
    }

    /// `|i><j|`.
    pub fn ket_bra(dim: usize, i: usize, j: usize) -> Result<Self> {
        if i >= dim || j >= dim {
            return Err(Error::InvalidDimension(format!(
                "basis index ({i}, {j}) outside dimension {dim}"
            )));
        }
        let mut m = DMatrix::zeros(dim, dim);
        m[(i, j)] = ONE;
        Self::new(m)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub(crate) fn from_matrix_unchecked(mat: DMatrix<C64>) -> Self {
        debug_assert!(mat.is_square());
        Self { mat, label: None }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            label: self.label.as_ref().map(|l| format!("{l}^dag")),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_matrix_unchecked(self.mat.transpose())
    }

    /// Max entrywise `|X - X^dag|`.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let residual = self.hermitian_residual();
        if residual > tol {
            return Err(Error::NotHermitian { residual });
        }
        Ok(())
    }

    pub fn ensure_same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::ShapeError {
                expected: format!("dimension {}", self.dim()),
                found: format!("dimension {}", other.dim()),
            });
        }
        Ok(())
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        Self::from_matrix_unchecked(&self.mat * &other.mat - &other.mat * &self.mat)
    }

    pub fn anticommutator(&self, other: &Operator) -> Operator {
        Self::from_matrix_unchecked(&self.mat * &other.mat + &other.mat * &self.mat)
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Self::from_matrix_unchecked(&self.mat * factor)
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Operator) -> C64 {
        let n = self.dim();
        let mut acc = ZERO;
        for j in 0..n {
            for i in 0..n {
                acc += self.mat[(i, j)] * other.mat[(j, i)];
            }
        }
        acc
    }

    pub fn kron(&self, other: &Operator) -> Operator {
        Self::from_matrix_unchecked(self.mat.kronecker(&other.mat))
    }

    pub fn is_diagonal(&self) -> bool {
        linalg::is_diagonal(&self.mat)
    }

    /// Column-stacked `vec(X)`.
    pub fn vectorize(&self) -> DVector<C64> {
        DVector::from_column_slice(self.mat.as_slice())
    }

    /// Inverse of [`Operator::vectorize`].
    pub fn unvectorize(dim: usize, v: &DVector<C64>) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::ShapeError {
                expected: format!("vector of length {}", dim * dim),
                found: format!("length {}", v.len()),
            });
        }
        Self::new(DMatrix::from_column_slice(dim, dim, v.as_slice()))
    }

    /// Spectrum and eigenvectors of a Hermitian operator, eigenvalues
    /// ascending.
    pub fn eigh(&self) -> (Vec<f64>, DMatrix<C64>) {
        linalg::hermitian_eigh(&self.mat)
    }

    pub fn eigenvalues_hermitian(&self) -> Vec<f64> {
        linalg::hermitian_eigvals(&self.mat)
    }

    /// `f(X)` for Hermitian `X` through its spectral decomposition.
    pub fn hermitian_fn(&self, f: impl Fn(f64) -> f64) -> Operator {
        Self::from_matrix_unchecked(linalg::hermitian_fn(&self.mat, f))
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator::from_matrix_unchecked(&self.mat + &rhs.mat)
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        Operator::from_matrix_unchecked(self.mat + rhs.mat)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator::from_matrix_unchecked(&self.mat - &rhs.mat)
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        Operator::from_matrix_unchecked(self.mat - rhs.mat)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator::from_matrix_unchecked(&self.mat * &rhs.mat)
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        Operator::from_matrix_unchecked(self.mat * rhs.mat)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        Operator::from_matrix_unchecked(&self.mat * C64::new(rhs, 0.0))
    }
}

impl Mul<f64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        Operator::from_matrix_unchecked(self.mat * C64::new(rhs, 0.0))
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator::from_matrix_unchecked(-self.mat)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator::from_matrix_unchecked(-&self.mat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(dim: usize, seed: u64) -> Operator {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        Operator::from_fn(dim, |_, _| C64::new(next(), next())).unwrap()
    }

    #[test]
    fn rejects_non_square() {
        let m = DMatrix::<C64>::zeros(2, 3);
        assert!(matches!(Operator::new(m), Err(Error::ShapeError { .. })));
        assert!(matches!(
            Operator::new(DMatrix::<C64>::zeros(0, 0)),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn vec_layout_is_column_stacking() {
        let x = Operator::from_fn(3, |i, j| C64::new((10 * i + j) as f64, 0.0)).unwrap();
        let v = x.vectorize();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(v[j * 3 + i], x.matrix()[(i, j)]);
            }
        }
        assert_eq!(Operator::unvectorize(3, &v).unwrap(), x);
    }

    #[test]
    fn double_adjoint_is_exact() {
        let x = sample(4, 7);
        assert_eq!(x.adjoint().adjoint().matrix(), x.matrix());
    }

    #[test]
    fn trace_product_matches_product() {
        let a = sample(5, 1);
        let b = sample(5, 2);
        assert!((a.trace_product(&b) - (&a * &b).trace()).norm() < 1e-13);
    }

    #[test]
    fn hermitian_residual_detects_asymmetry() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = C64::new(0.0, 1.0);
        let x = Operator::new(m).unwrap();
        assert!((x.hermitian_residual() - 1.0).abs() < 1e-15);
        assert!(matches!(x.ensure_hermitian(1e-12), Err(Error::NotHermitian { .. })));
    }
}
