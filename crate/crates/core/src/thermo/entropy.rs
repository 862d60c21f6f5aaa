use crate::error::{Error, Result};
use crate::gkls::{stationarity_residual, GklsGenerator};
use crate::opcore::{DensityMatrix, Operator};
use crate::tolerance::Tolerances;

/// Slack below zero tolerated before entropy production is reported as a
/// violation.
pub const SPOHN_SLACK: f64 = 1e-10;

/// `S = -Tr(rho ln rho)`; zero eigenvalues contribute nothing.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// `S(rho1 | rho2) = Tr(rho1 ln rho1 - rho1 ln rho2)`.
///
/// The logarithm of `rho2` is taken on its support (eigenvalues above the
/// log floor); weight of `rho1` outside that support is a `SupportError`.
pub fn relative_entropy(rho1: &DensityMatrix, rho2: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    rho1.op().ensure_same_dim(rho2.op())?;
    let (values, vectors) = rho2.op().eigh();
    let n = rho2.dim();
    let mut log_rho2 = nalgebra::DMatrix::zeros(n, n);
    let mut leak = 0.0;
    for (k, &p) in values.iter().enumerate() {
        let v = vectors.column(k);
        let weight = (v.adjoint() * rho1.matrix() * v)[(0, 0)].re;
        if p > tol.log_floor {
            log_rho2 += (v * v.adjoint()) * crate::opcore::C64::new(p.ln(), 0.0);
        } else {
            leak += weight;
        }
    }
    if leak > tol.trace {
        return Err(Error::SupportError { leak });
    }
    let cross = rho1.op().trace_product(&Operator::new(log_rho2)?).re;
    Ok(-von_neumann_entropy(rho1) - cross)
}

fn ensure_log_safe(rho: &DensityMatrix, tol: &Tolerances) -> Result<()> {
    let min = rho.min_eigenvalue();
    if min <= tol.log_floor {
        return Err(Error::SingularLogarithm {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// Entropy production `sigma = -Tr[L(rho) (ln rho - ln rho_bar)]` relative to
/// the stationary state `rho_bar`. Non-negative by the Spohn inequality; a
/// value below `-SPOHN_SLACK` is returned as an error.
pub fn entropy_production(
    gen: &GklsGenerator,
    rho: &DensityMatrix,
    rho_bar: &DensityMatrix,
    tol: &Tolerances,
) -> Result<f64> {
    gen.hamiltonian().ensure_same_dim(rho.op())?;
    rho.op().ensure_same_dim(rho_bar.op())?;
    let residual = stationarity_residual(&gen.schrodinger_super(), rho_bar)?;
    if residual > tol.stationarity {
        return Err(Error::NotStationary { residual });
    }
    ensure_log_safe(rho, tol)?;
    ensure_log_safe(rho_bar, tol)?;
    let log_diff = rho.op().hermitian_fn(f64::ln) - rho_bar.op().hermitian_fn(f64::ln);
    let flow = gen.apply(rho.op())?;
    let sigma = -flow.trace_product(&log_diff).re;
    if sigma < -SPOHN_SLACK {
        return Err(Error::SpohnViolation { sigma });
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_limits() {
        let pure = DensityMatrix::basis_state(3, 1).unwrap();
        assert_eq!(von_neumann_entropy(&pure), 0.0);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!((von_neumann_entropy(&mixed) - 4f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn relative_entropy_support() {
        let tol = Tolerances::default();
        let a = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let b = DensityMatrix::basis_state(2, 0).unwrap();
        assert!(matches!(
            relative_entropy(&a, &b, &tol),
            Err(Error::SupportError { .. })
        ));
        let s = relative_entropy(&b, &a, &tol).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-14);
        assert!(relative_entropy(&a, &a, &tol).unwrap().abs() < 1e-15);
    }
}
