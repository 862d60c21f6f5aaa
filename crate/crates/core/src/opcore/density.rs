use nalgebra::{DMatrix, DVector};

use super::operator::{Operator, C64, ZERO};
use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerance::Tolerances;

/// Above this dimension positivity is certified with a Cholesky factorisation
/// of `rho + slack * I` instead of a full eigenvalue computation.
const CHOLESKY_POSITIVITY_DIM: usize = 200;

/// Positive unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Validates trace, Hermiticity and positivity against `tol`.
    pub fn new(op: Operator, tol: &Tolerances) -> Result<Self> {
        check_state(op.matrix(), tol)?;
        Ok(Self { op })
    }

    pub fn with_default_tolerances(op: Operator) -> Result<Self> {
        Self::new(op, &Tolerances::default())
    }

    pub(crate) fn from_trusted(op: Operator) -> Self {
        Self { op }
    }

    /// Hermitises and trace-normalises `mat`, then validates.
    pub fn from_unnormalized(mat: DMatrix<C64>, tol: &Tolerances) -> Result<Self> {
        let h = linalg::hermitize(&mat);
        let tr = h.trace().re;
        if !(tr.abs() > f64::MIN_POSITIVE) || !tr.is_finite() {
            return Err(Error::NotAState(format!("cannot normalise trace {tr:.3e}")));
        }
        Self::new(Operator::new(h * C64::new(1.0 / tr, 0.0))?, tol)
    }

    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        Self::with_default_tolerances(Operator::diagonal(populations)?)
    }

    /// `|psi><psi|` for a normalised copy of `psi`.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = linalg::vec_norm(psi);
        if norm == 0.0 {
            return Err(Error::NotAState("zero state vector".into()));
        }
        let v = psi / C64::new(norm, 0.0);
        Ok(Self::from_trusted(Operator::new(&v * v.adjoint())?))
    }

    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        Ok(Self::from_trusted(Operator::ket_bra(dim, index, index)?))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Ok(Self::from_trusted(Operator::identity(dim)? * (1.0 / dim as f64)))
    }

    /// `exp(-beta H) / Z`.
    pub fn gibbs(h: &Operator, beta: f64) -> Result<Self> {
        h.ensure_hermitian(Tolerances::default().hamiltonian_hermiticity)?;
        let shift = h.eigenvalues_hermitian().first().copied().unwrap_or(0.0);
        let unnorm = h.hermitian_fn(|e| (-beta * (e - shift)).exp());
        let z = unnorm.trace().re;
        Ok(Self::from_trusted(unnorm * (1.0 / z)))
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        self.op.matrix()
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.op.eigenvalues_hermitian()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn purity(&self) -> f64 {
        self.op.trace_product(&self.op).re
    }

    /// `Tr(rho X)`.
    pub fn expectation(&self, x: &Operator) -> C64 {
        self.op.trace_product(x)
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix()[(i, i)].re).collect()
    }

    /// Half the trace norm of the difference.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.op.ensure_same_dim(&other.op)?;
        let diff = &self.op - &other.op;
        Ok(0.5 * diff.eigenvalues_hermitian().iter().map(|x| x.abs()).sum::<f64>())
    }
}

/// Trace, Hermiticity and numerical positivity of a candidate state matrix.
pub(crate) fn check_state(mat: &DMatrix<C64>, tol: &Tolerances) -> Result<()> {
    check_trace_and_hermiticity(mat, tol)?;
    if let Some(min) = negative_eigenvalue(mat, tol.positivity) {
        return Err(Error::NotAState(format!("minimum eigenvalue {min:.3e}")));
    }
    Ok(())
}

pub(crate) fn check_trace_and_hermiticity(mat: &DMatrix<C64>, tol: &Tolerances) -> Result<()> {
    let n = mat.nrows();
    if n == 0 || n != mat.ncols() {
        return Err(Error::NotAState("matrix is empty or not square".into()));
    }
    if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NotAState("non-finite entries".into()));
    }
    let tr = mat.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > tol.trace {
        return Err(Error::NotAState(format!(
            "trace {:.12e}{:+.3e}i differs from 1",
            tr.re, tr.im
        )));
    }
    let mut herm = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            herm = herm.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    if herm > tol.hermiticity {
        return Err(Error::NotAState(format!("Hermiticity residual {herm:.3e}")));
    }
    Ok(())
}

/// Returns the minimum eigenvalue if it lies below `-slack`.
fn negative_eigenvalue(mat: &DMatrix<C64>, slack: f64) -> Option<f64> {
    let n = mat.nrows();
    if linalg::is_diagonal(mat) {
        let min = (0..n).map(|i| mat[(i, i)].re).fold(f64::INFINITY, f64::min);
        return (min < -slack).then_some(min);
    }
    if n > CHOLESKY_POSITIVITY_DIM {
        let mut shifted = linalg::hermitize(mat);
        for i in 0..n {
            shifted[(i, i)] += C64::new(slack, 0.0);
        }
        if linalg::is_positive_definite(&shifted) {
            return None;
        }
    }
    let min = linalg::hermitian_eigvals(mat).first().copied().unwrap_or(0.0);
    (min < -slack).then_some(min)
}

/// Sum of the diagonal entries of an operator whose column-stacked position
/// lies in `indices`.
pub(crate) fn restricted_trace(dim: usize, v: &DVector<C64>, indices: &[usize]) -> C64 {
    indices
        .iter()
        .filter(|&&idx| idx % dim == idx / dim)
        .fold(ZERO, |acc, &idx| acc + v[idx])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_state_and_rejects_bad_ones() {
        assert!(DensityMatrix::diagonal(&[0.25, 0.75]).is_ok());
        assert!(matches!(
            DensityMatrix::diagonal(&[0.5, 0.6]),
            Err(Error::NotAState(_))
        ));
        assert!(matches!(
            DensityMatrix::diagonal(&[1.5, -0.5]),
            Err(Error::NotAState(_))
        ));
        let mut m = DMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::with_default_tolerances(Operator::new(m).unwrap()).is_err());
    }

    #[test]
    fn cholesky_route_rejects_negative_state() {
        let n = CHOLESKY_POSITIVITY_DIM + 5;
        let mut m = DMatrix::from_diagonal_element(n, n, C64::new(1.0 / n as f64, 0.0));
        m[(0, 1)] = C64::new(0.01, 0.0);
        m[(1, 0)] = C64::new(0.01, 0.0);
        let err = DensityMatrix::with_default_tolerances(Operator::new(m).unwrap());
        assert!(matches!(err, Err(Error::NotAState(_))));
    }

    #[test]
    fn gibbs_two_level() {
        let h = Operator::diagonal(&[0.0, 2f64.ln()]).unwrap();
        let rho = DensityMatrix::gibbs(&h, 1.0).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 2.0 / 3.0).abs() < 1e-15);
        assert!((rho.matrix()[(1, 1)].re - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let a = DensityMatrix::basis_state(3, 0).unwrap();
        let b = DensityMatrix::basis_state(3, 2).unwrap();
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-14);
    }
}
