use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gkls::GklsGenerator;
use crate::opcore::{DensityMatrix, Operator};
use crate::tolerance::Tolerances;

/// Imaginary parts of expectation values of Hermitian operators above this
/// (relative to the operator scale) signal a corrupted input.
const IMAGINARY_SLACK: f64 = 1e-12;

fn real_expectation(rho: &DensityMatrix, x: &Operator) -> Result<f64> {
    rho.op().ensure_same_dim(x)?;
    x.ensure_hermitian(Tolerances::default().hamiltonian_hermiticity)?;
    let value = rho.expectation(x);
    if value.im.abs() > IMAGINARY_SLACK * (1.0 + x.max_abs()) {
        return Err(Error::Numerical(format!(
            "expectation of a Hermitian operator has imaginary part {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// `U = Tr(rho H)`.
pub fn internal_energy(rho: &DensityMatrix, h: &Operator) -> Result<f64> {
    real_expectation(rho, h)
}

/// `P = -Tr(rho dH/dt)`, the power delivered to the work reservoir.
pub fn instantaneous_power(rho: &DensityMatrix, dh_dt: &Operator) -> Result<f64> {
    Ok(-real_expectation(rho, dh_dt)?)
}

/// A bath: label, inverse temperature and the generator terms it owns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathAssignment {
    pub label: String,
    pub beta: f64,
    pub terms: Vec<usize>,
}

impl BathAssignment {
    /// Groups the generator's terms by their bath label. Every label of the
    /// generator must appear in `betas`.
    pub fn from_labels(gen: &GklsGenerator, betas: &[(&str, f64)]) -> Result<Vec<Self>> {
        let mut baths: Vec<Self> = betas
            .iter()
            .map(|&(label, beta)| Self {
                label: label.to_string(),
                beta,
                terms: Vec::new(),
            })
            .collect();
        for (k, term) in gen.terms().iter().enumerate() {
            let bath = baths
                .iter_mut()
                .find(|b| b.label == term.bath())
                .ok_or(Error::IncompleteAssignment { term: k })?;
            bath.terms.push(k);
        }
        Ok(baths)
    }
}

/// Every term of `gen` belongs to exactly one bath.
pub fn validate_assignment(gen: &GklsGenerator, baths: &[BathAssignment]) -> Result<()> {
    let mut owner = vec![0usize; gen.terms().len()];
    for bath in baths {
        for &k in &bath.terms {
            match owner.get_mut(k) {
                Some(count) => *count += 1,
                None => return Err(Error::IncompleteAssignment { term: k }),
            }
        }
    }
    if let Some(term) = owner.iter().position(|&c| c != 1) {
        return Err(Error::IncompleteAssignment { term });
    }
    Ok(())
}

/// Heat currents `J_k = Tr(H L_k(rho))` into the system, one per bath, and
/// their sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatCurrents {
    pub per_bath: Vec<f64>,
    pub total: f64,
}

pub fn heat_currents(
    gen: &GklsGenerator,
    baths: &[BathAssignment],
    rho: &DensityMatrix,
    h: &Operator,
) -> Result<HeatCurrents> {
    validate_assignment(gen, baths)?;
    rho.op().ensure_same_dim(h)?;
    let mut per_bath = Vec::with_capacity(baths.len());
    for bath in baths {
        let flow = gen.apply_dissipator(rho.op(), Some(&bath.terms))?;
        per_bath.push(h.trace_product(&flow).re);
    }
    let total = per_bath.iter().sum();
    Ok(HeatCurrents { per_bath, total })
}
