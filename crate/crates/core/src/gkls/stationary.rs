//! Kernel of the Schrodinger generator.
//!
//! The superoperator is split into its invariant blocks and each block's
//! kernel is read off its singular value decomposition. Blocks are small
//! for the structured generators in this crate (populations and fixed
//! coherence sectors), so a dense SVD per block is cheap.

use nalgebra::{DMatrix, DVector};

use super::generator::GklsGenerator;
use crate::error::{Error, Result};
use crate::opcore::{restricted_trace, DensityMatrix, SuperOperator, C64, ZERO};
use crate::tolerance::Tolerances;

/// Largest block handled by the dense kernel solver.
const MAX_KERNEL_BLOCK: usize = 4096;

/// Kernel basis of one invariant block.
struct BlockKernel {
    indices: Vec<usize>,
    vectors: Vec<DVector<C64>>,
}

fn block_kernels(l: &SuperOperator, tol: &Tolerances) -> Result<Vec<BlockKernel>> {
    let mut out = Vec::new();
    for indices in l.blocks() {
        if indices.len() > MAX_KERNEL_BLOCK {
            return Err(Error::InvalidDimension(format!(
                "invariant block of size {} exceeds the dense kernel limit {MAX_KERNEL_BLOCK}",
                indices.len()
            )));
        }
        let vectors = dense_kernel(&l.dense_block(&indices), tol.nullspace);
        if !vectors.is_empty() {
            out.push(BlockKernel { indices, vectors });
        }
    }
    Ok(out)
}

/// Right singular vectors whose singular value is below
/// `threshold * max(1, sigma_max)`.
fn dense_kernel(block: &DMatrix<C64>, threshold: f64) -> Vec<DVector<C64>> {
    let n = block.nrows();
    if n == 1 {
        return if block[(0, 0)].norm() <= threshold {
            vec![DVector::from_element(1, C64::new(1.0, 0.0))]
        } else {
            Vec::new()
        };
    }
    let svd = block.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = threshold * sigma_max.max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect()
}

/// Unique stationary state `L(rho) = 0`.
pub fn stationary_state(gen: &GklsGenerator, tol: &Tolerances) -> Result<DensityMatrix> {
    stationary_from_super(&gen.schrodinger_super(), tol)
}

pub fn stationary_from_super(l: &SuperOperator, tol: &Tolerances) -> Result<DensityMatrix> {
    let kernels = block_kernels(l, tol)?;
    let nullity: usize = kernels.iter().map(|k| k.vectors.len()).sum();
    if nullity != 1 {
        return Err(if nullity == 0 {
            Error::Numerical("generator has no kernel within the null-space threshold".into())
        } else {
            Error::NonUniqueStationary { nullity }
        });
    }
    let k = &kernels[0];
    let mut v = DVector::from_element(l.size(), ZERO);
    for (&g, x) in k.indices.iter().zip(k.vectors[0].iter()) {
        v[g] = *x;
    }
    finish(l, v, tol)
}

/// Stationary state that carries the same weight as `reference` on every
/// invariant population block.
///
/// Generators with a conserved charge (particle number, say) have one
/// stationary state per charge sector; the sector weights are then fixed by
/// the initial condition, here taken from `reference`. Blocks on which the
/// reference vanishes are left empty; every other block must have a
/// one-dimensional kernel with non-zero trace.
pub fn stationary_state_in_sectors(
    gen: &GklsGenerator,
    reference: &DensityMatrix,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    let l = gen.schrodinger_super();
    if reference.dim() != l.dim() {
        return Err(Error::ShapeError {
            expected: format!("dimension {}", l.dim()),
            found: format!("dimension {}", reference.dim()),
        });
    }
    let dim = l.dim();
    let ref_vec = reference.op().vectorize();
    let mut v = DVector::from_element(l.size(), ZERO);
    for k in block_kernels(&l, tol)? {
        let weight_norm = k.indices.iter().map(|&g| ref_vec[g].norm()).fold(0.0, f64::max);
        if weight_norm == 0.0 {
            // The reference has no component here, so neither does the
            // stationary state it selects.
            continue;
        }
        if k.vectors.len() > 1 {
            return Err(Error::NonUniqueStationary {
                nullity: k.vectors.len(),
            });
        }
        let local = &k.vectors[0];
        let local_full = scatter(l.size(), &k.indices, local);
        let trace = restricted_trace(dim, &local_full, &k.indices);
        if trace.norm() <= tol.nullspace * norm(local) {
            return Err(Error::NonUniqueStationary { nullity: 2 });
        }
        let weight = restricted_trace(dim, &ref_vec, &k.indices);
        let scale = weight / trace;
        for (&g, x) in k.indices.iter().zip(local.iter()) {
            v[g] = *x * scale;
        }
    }
    finish(&l, v, tol)
}

fn scatter(size: usize, indices: &[usize], local: &DVector<C64>) -> DVector<C64> {
    let mut v = DVector::from_element(size, ZERO);
    for (&g, x) in indices.iter().zip(local.iter()) {
        v[g] = *x;
    }
    v
}

fn norm(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn finish(l: &SuperOperator, v: DVector<C64>, tol: &Tolerances) -> Result<DensityMatrix> {
    let dim = l.dim();
    let mat = DMatrix::from_column_slice(dim, dim, v.as_slice());
    let rho = DensityMatrix::from_unnormalized(mat, tol)?;
    let residual = stationarity_residual(l, &rho)?;
    if residual > tol.stationarity {
        return Err(Error::NotStationary { residual });
    }
    Ok(rho)
}

/// Frobenius norm of `L(rho)`.
pub fn stationarity_residual(l: &SuperOperator, rho: &DensityMatrix) -> Result<f64> {
    Ok(norm(&l.apply(&rho.op().vectorize())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gkls::generator::{thermal_pair, LindbladTerm};
    use crate::opcore::{fock_annihilation, number_operator, Operator};

    #[test]
    fn thermal_two_level() {
        let w = 1.0;
        let h = Operator::diagonal(&[0.0, w]).unwrap();
        let sm = fock_annihilation(2).unwrap();
        let terms = thermal_pair(&h, &sm, 1.0, w, 2f64.ln(), "b").unwrap().to_vec();
        let gen = GklsGenerator::new(h, terms).unwrap();
        let rho = stationary_state(&gen, &Tolerances::default()).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 2.0 / 3.0).abs() < 1e-12);
        assert!((rho.matrix()[(1, 1)].re - 1.0 / 3.0).abs() < 1e-12);
        let res = stationarity_residual(&gen.schrodinger_super(), &rho).unwrap();
        assert!(res < 1e-10);
    }

    #[test]
    fn pumped_damped_oscillator_is_thermal() {
        let dim = 40;
        let a = fock_annihilation(dim).unwrap();
        let n = number_operator(dim).unwrap();
        let gen = GklsGenerator::new(
            n.clone(),
            vec![
                LindbladTerm::new(a.clone(), 1.0, "b").unwrap(),
                LindbladTerm::new(a.adjoint(), 0.25, "b").unwrap(),
            ],
        )
        .unwrap();
        let rho = stationary_state(&gen, &Tolerances::default()).unwrap();
        assert!((rho.expectation(&n).re - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_hamiltonian_is_not_unique() {
        let gen = GklsGenerator::new(Operator::identity(3).unwrap(), vec![]).unwrap();
        assert!(matches!(
            stationary_state(&gen, &Tolerances::default()),
            Err(Error::NonUniqueStationary { .. })
        ));
    }

    #[test]
    fn sector_weights_follow_reference() {
        // Two decoupled two-level sectors {0,1} and {2,3}, each damped.
        let h = Operator::diagonal(&[0.0, 1.0, 0.0, 1.0]).unwrap();
        let a = Operator::ket_bra(4, 0, 1).unwrap();
        let b = Operator::ket_bra(4, 2, 3).unwrap();
        let gen = GklsGenerator::new(
            h,
            vec![
                LindbladTerm::new(a, 1.0, "b").unwrap(),
                LindbladTerm::new(b, 1.0, "b").unwrap(),
            ],
        )
        .unwrap();
        let tol = Tolerances::default();
        assert!(matches!(
            stationary_state(&gen, &tol),
            Err(Error::NonUniqueStationary { .. })
        ));
        let reference = DensityMatrix::diagonal(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let rho = stationary_state_in_sectors(&gen, &reference, &tol).unwrap();
        let p = rho.populations();
        assert!((p[0] - 0.3).abs() < 1e-12 && (p[2] - 0.7).abs() < 1e-12);
    }
}
