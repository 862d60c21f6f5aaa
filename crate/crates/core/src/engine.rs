//! Average power of a weakly, periodically driven open system.
//!
//! For `H(t) = H0 + xi(t) M` with `xi(t) = g sin(Omega t)` the
//! period-averaged power to second order in `g` is
//!
//! `P = -(g^2 / 2) Tr(rho' Y)`, `Y = Omega^2 (Omega^2 + L*^2)^{-1} L* M`,
//!
//! where `rho'` is the derivative of the stationary state with respect to
//! `xi` at zero and `L*` the Heisenberg generator at zero. For fast driving
//! `Y` reduces to `L* M`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gkls::{
    detailed_balance_report, stationary_state, weighted_inner_product, GeneratorFamily,
    GklsGenerator,
};
use crate::linalg;
use crate::opcore::{DensityMatrix, Operator, SuperOperator, C64};
use crate::tolerance::Tolerances;

/// Identity residual above which the finite-difference derivative is
/// rejected.
pub const MAX_IDENTITY_RESIDUAL: f64 = 1e-4;
/// Stricter bound a [`PowerReport`] must meet to be returned.
pub const REPORT_IDENTITY_RESIDUAL: f64 = 1e-6;

/// Condition number above which the resolvent system counts as singular.
pub const MAX_RESOLVENT_CONDITION: f64 = 1e12;

/// Detailed-balance residual threshold used to accept a generator as an
/// equilibrium one.
pub const EQUILIBRIUM_THRESHOLD: f64 = 1e-8;

/// Solves for the stationary state of one member of a family.
pub type StationarySolver<'a> = dyn Fn(&GklsGenerator, f64) -> Result<DensityMatrix> + 'a;

/// `d rho_bar / d xi` at `xi = 0`.
#[derive(Debug, Clone)]
pub struct StationaryDerivative {
    pub derivative: Operator,
    pub rho_bar: DensityMatrix,
    /// `|| L'[0] rho_bar + L[0] rho_bar' ||_F`.
    pub identity_residual: f64,
    /// `|| D(delta) - D(delta / 2) ||_F`, a measure of the stencil error.
    pub richardson_difference: f64,
    pub delta: f64,
}

/// `1e-4` times the ratio of the spectral scales of `H0` and `M`, at least
/// `1e-4`.
pub fn default_delta(family: &GeneratorFamily) -> f64 {
    let scale = |op: &Operator| {
        let e = op.eigenvalues_hermitian();
        e.iter().map(|x| x.abs()).fold(0.0, f64::max)
    };
    let m = scale(family.drive());
    let ratio = if m > 0.0 { scale(family.h0()) / m } else { 1.0 };
    1e-4 * ratio.max(1.0)
}

/// Central difference of unique stationary states at `xi = +-delta`.
pub fn stationary_derivative(
    family: &GeneratorFamily,
    delta: f64,
    tol: &Tolerances,
) -> Result<StationaryDerivative> {
    stationary_derivative_with(family, delta, &|gen, _| stationary_state(gen, tol))
}

/// As [`stationary_derivative`] with a caller-supplied stationary solver,
/// for families with several stationary states (conserved charges).
pub fn stationary_derivative_with(
    family: &GeneratorFamily,
    delta: f64,
    solve: &StationarySolver<'_>,
) -> Result<StationaryDerivative> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step must be positive, got {delta}"
        )));
    }
    let at = |xi: f64| -> Result<(GklsGenerator, DensityMatrix)> {
        let gen = family.generator(xi)?;
        let rho = solve(&gen, xi)?;
        Ok((gen, rho))
    };
    let (gen0, rho0) = at(0.0)?;
    let (gen_p, rho_p) = at(delta)?;
    let (gen_m, rho_m) = at(-delta)?;
    let (_, rho_hp) = at(0.5 * delta)?;
    let (_, rho_hm) = at(-0.5 * delta)?;
    let derivative = (rho_p.op() - rho_m.op()) * (0.5 / delta);
    let half = (rho_hp.op() - rho_hm.op()) * (1.0 / delta);
    let richardson_difference = (&derivative - &half).norm();

    let l0 = gen0.schrodinger_super();
    let l_prime = gen_p
        .schrodinger_super()
        .add_scaled(&gen_m.schrodinger_super(), C64::new(-1.0, 0.0))?
        .scale(C64::new(0.5 / delta, 0.0));
    let lhs = l_prime.apply(&rho0.op().vectorize())? + l0.apply(&derivative.vectorize())?;
    let identity_residual = linalg::vec_norm(&lhs);
    if identity_residual > MAX_IDENTITY_RESIDUAL {
        return Err(Error::IdentityViolation {
            residual: identity_residual,
        });
    }
    Ok(StationaryDerivative {
        derivative,
        rho_bar: rho0,
        identity_residual,
        richardson_difference,
        delta,
    })
}

/// `-(g^2 / 2) Tr(rho' L*[0] M)`.
pub fn average_power_fast(family: &GeneratorFamily, deriv: &StationaryDerivative) -> Result<f64> {
    let l_star_m = family.generator(0.0)?.apply_heisenberg(family.drive())?;
    let g = family.amplitude();
    Ok(-0.5 * g * g * deriv.derivative.trace_product(&l_star_m).re)
}

/// `-(g^2 / 2) Tr(rho' Y)` with `(Omega^2 + L*^2) Y = Omega^2 L* M` solved
/// block by block.
pub fn average_power_resolvent(
    family: &GeneratorFamily,
    deriv: &StationaryDerivative,
) -> Result<f64> {
    let y = resolvent_response(family)?;
    let g = family.amplitude();
    Ok(-0.5 * g * g * deriv.derivative.trace_product(&y).re)
}

/// `Y = Omega^2 (Omega^2 + L*^2)^{-1} L* M`.
pub fn resolvent_response(family: &GeneratorFamily) -> Result<Operator> {
    let heis = family.generator(0.0)?.heisenberg_super();
    let w2 = family.frequency().powi(2);
    let system = SuperOperator::identity(heis.dim())
        .scale(C64::new(w2, 0.0))
        .add_scaled(&heis.compose(&heis)?, C64::new(1.0, 0.0))?;
    let rhs = heis.apply(&family.drive().vectorize())? * C64::new(w2, 0.0);
    let mut y = DVector::from_element(rhs.len(), C64::new(0.0, 0.0));
    for block in system.blocks() {
        let local = DVector::from_iterator(block.len(), block.iter().map(|&g| rhs[g]));
        if local.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let a = system.dense_block(&block);
        let (s_max, s_min) = linalg::singular_range(&a);
        let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
        if condition > MAX_RESOLVENT_CONDITION {
            return Err(Error::ResolventSingular { condition });
        }
        let x = a
            .lu()
            .solve(&local)
            .ok_or(Error::ResolventSingular { condition })?;
        for (&g, v) in block.iter().zip(x.iter()) {
            y[g] = *v;
        }
    }
    Operator::unvectorize(heis.dim(), &y)
}

/// `(g^2 / 2) beta <M, L*[0] M>` in the Gibbs-weighted inner product, the
/// average power of a single-bath engine. Requires `gen` to satisfy
/// detailed balance with respect to its Gibbs state at `beta`.
pub fn equilibrium_power_bound(
    gen: &GklsGenerator,
    drive: &Operator,
    beta: f64,
    amplitude: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let gibbs = DensityMatrix::gibbs(gen.hamiltonian(), beta)?;
    let report = match detailed_balance_report(gen, &gibbs, EQUILIBRIUM_THRESHOLD, tol) {
        Ok(r) => r,
        Err(Error::NotStationary { residual }) => {
            return Err(Error::NotEquilibrium(format!(
                "Gibbs state at beta = {beta} is not stationary (residual {residual:.3e})"
            )))
        }
        Err(e) => return Err(e),
    };
    if !report.passed {
        return Err(Error::NotEquilibrium(format!(
            "largest detailed-balance residual {:.3e}",
            report.max_residual()
        )));
    }
    let l_star_m = gen.apply_heisenberg(drive)?;
    let form = weighted_inner_product(drive, &l_star_m, &gibbs)?.re;
    let value = 0.5 * amplitude * amplitude * beta * form;
    if value > 1e-12 {
        return Err(Error::Numerical(format!(
            "equilibrium power {value:.3e} is positive"
        )));
    }
    Ok(value)
}

/// Both power estimates and the identity residual for one family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerReport {
    pub p_bar_resolvent: f64,
    pub p_bar_fast: f64,
    pub identity_residual: f64,
    /// Equilibrium bound when the family has a single bath at a known
    /// temperature.
    pub single_bath: Option<f64>,
}

/// Evaluates a [`PowerReport`]; `single_bath_beta` adds the equilibrium
/// bound for a one-bath family.
pub fn power_report(
    family: &GeneratorFamily,
    delta: f64,
    single_bath_beta: Option<f64>,
    tol: &Tolerances,
) -> Result<PowerReport> {
    let deriv = stationary_derivative(family, delta, tol)?;
    if deriv.identity_residual >= REPORT_IDENTITY_RESIDUAL {
        return Err(Error::IdentityViolation {
            residual: deriv.identity_residual,
        });
    }
    let single_bath = match single_bath_beta {
        Some(beta) => Some(equilibrium_power_bound(
            &family.generator(0.0)?,
            family.drive(),
            beta,
            family.amplitude(),
            tol,
        )?),
        None => None,
    };
    Ok(PowerReport {
        p_bar_resolvent: average_power_resolvent(family, &deriv)?,
        p_bar_fast: average_power_fast(family, &deriv)?,
        identity_residual: deriv.identity_residual,
        single_bath,
    })
}
