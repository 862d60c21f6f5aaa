//! Time evolution under static and periodically driven generators.
//!
//! The static and driven propagators exponentiate each invariant block of
//! the superoperator densely. The banded propagator is for large truncated
//! oscillators whose blocks are narrow bands: it applies the L-stable
//! fifth-order Radau IIA stability function through banded complex LU
//! solves, so the cost is linear in the number of vector entries.

use nalgebra::{DMatrix, DVector};

use super::family::GeneratorFamily;
use super::generator::GklsGenerator;
use crate::error::{Error, Result};
use crate::linalg::{radau_partial_fractions, BandedLu};
use crate::opcore::{
    check_state, check_trace_and_hermiticity, DensityMatrix, Operator, SuperOperator, C64, ZERO,
};
use crate::tolerance::Tolerances;

/// Largest invariant block that is exponentiated densely.
const MAX_EXP_BLOCK: usize = 2048;

/// States on a time grid, plus the drive samples `xi(t_k)` for driven runs.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    drive: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// `xi(t_k)` for trajectories produced by [`evolve_driven`].
    pub fn drive_samples(&self) -> Option<&[f64]> {
        self.drive.as_deref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectories hold at least the initial state")
    }
}

/// Non-empty, finite, strictly increasing.
pub fn validate_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidGrid("time grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("time grid has non-finite entries".into()));
    }
    if let Some(k) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "times must be strictly increasing (t[{k}] = {}, t[{}] = {})",
            times[k],
            k + 1,
            times[k + 1]
        )));
    }
    Ok(())
}

/// `n` equally spaced intervals on `[0, t_max]`, i.e. `n + 1` points.
pub fn uniform_grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_max * k as f64 / n as f64).collect()
}

/// Dense exponentials of the invariant blocks, cached per step length.
struct BlockExp {
    blocks: Vec<Vec<usize>>,
    mats: Vec<DMatrix<C64>>,
    cache: Vec<(f64, Vec<DMatrix<C64>>)>,
}

impl BlockExp {
    fn new(l: &SuperOperator) -> Result<Self> {
        let blocks = l.blocks();
        if let Some(b) = blocks.iter().find(|b| b.len() > MAX_EXP_BLOCK) {
            return Err(Error::InvalidDimension(format!(
                "invariant block of size {} exceeds the dense exponential limit {MAX_EXP_BLOCK}",
                b.len()
            )));
        }
        let mats = blocks.iter().map(|b| l.dense_block(b)).collect();
        Ok(Self {
            blocks,
            mats,
            cache: Vec::new(),
        })
    }

    fn exps(&mut self, dt: f64) -> &[DMatrix<C64>] {
        let pos = self
            .cache
            .iter()
            .position(|(h, _)| (h - dt).abs() <= 1e-14 * dt.abs());
        let pos = match pos {
            Some(p) => p,
            None => {
                let scale = C64::new(dt, 0.0);
                let e = self.mats.iter().map(|m| (m * scale).exp()).collect();
                self.cache.push((dt, e));
                self.cache.len() - 1
            }
        };
        &self.cache[pos].1
    }

    fn step(&mut self, v: &DVector<C64>, dt: f64) -> DVector<C64> {
        let blocks = std::mem::take(&mut self.blocks);
        let exps = self.exps(dt);
        let mut out = DVector::from_element(v.len(), ZERO);
        for (b, e) in blocks.iter().zip(exps) {
            let local = DVector::from_iterator(b.len(), b.iter().map(|&g| v[g]));
            if local.iter().all(|z| *z == ZERO) {
                continue;
            }
            let next = e * local;
            for (&g, x) in b.iter().zip(next.iter()) {
                out[g] = *x;
            }
        }
        self.blocks = blocks;
        out
    }
}

fn to_state(dim: usize, v: &DVector<C64>) -> DMatrix<C64> {
    DMatrix::from_column_slice(dim, dim, v.as_slice())
}

fn drift(step: usize, err: Error) -> Error {
    Error::NumericalDrift {
        step,
        reason: err.to_string(),
    }
}

/// Propagates `rho0` (taken at `times[0]`) under a time-independent
/// generator with exact block exponentials, validating every state.
pub fn evolve(
    gen: &GklsGenerator,
    rho0: &DensityMatrix,
    times: &[f64],
    tol: &Tolerances,
) -> Result<Trajectory> {
    validate_grid(times)?;
    gen.hamiltonian().ensure_same_dim(rho0.op())?;
    let dim = gen.dim();
    let mut prop = BlockExp::new(&gen.schrodinger_super())?;
    let mut v = rho0.op().vectorize();
    let mut states = vec![rho0.clone()];
    for k in 1..times.len() {
        v = prop.step(&v, times[k] - times[k - 1]);
        let mat = to_state(dim, &v);
        check_state(&mat, tol).map_err(|e| drift(k, e))?;
        states.push(DensityMatrix::from_trusted(Operator::new(mat)?));
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        drive: None,
    })
}

/// Largest step for which freezing `L[xi(t)]` over one step is accepted:
/// `min(0.05 / Omega, 0.1 / max_rate)`.
pub fn quasi_static_step_limit(family: &GeneratorFamily) -> Result<f64> {
    let g = family.amplitude();
    let mut max_rate = 0.0f64;
    for xi in [-g, 0.0, g] {
        max_rate = max_rate.max(family.generator(xi)?.max_rate());
    }
    let mut limit = 0.05 / family.frequency();
    if max_rate > 0.0 {
        limit = limit.min(0.1 / max_rate);
    }
    Ok(limit)
}

/// Piecewise-frozen propagation: on `[t_k, t_{k+1}]` the generator
/// `L[xi((t_k + t_{k+1}) / 2)]` is exponentiated.
pub fn evolve_driven(
    family: &GeneratorFamily,
    rho0: &DensityMatrix,
    times: &[f64],
    tol: &Tolerances,
) -> Result<Trajectory> {
    validate_grid(times)?;
    family.h0().ensure_same_dim(rho0.op())?;
    let limit = quasi_static_step_limit(family)?;
    for w in times.windows(2) {
        let step = w[1] - w[0];
        if step > limit * (1.0 + 1e-12) {
            return Err(Error::StepTooLarge { step, limit });
        }
    }
    let dim = family.dim();
    let mut v = rho0.op().vectorize();
    let mut states = vec![rho0.clone()];
    for k in 1..times.len() {
        let mid = 0.5 * (times[k - 1] + times[k]);
        let gen = family.generator(family.xi(mid))?;
        let mut prop = BlockExp::new(&gen.schrodinger_super())?;
        v = prop.step(&v, times[k] - times[k - 1]);
        let mat = to_state(dim, &v);
        check_state(&mat, tol).map_err(|e| drift(k, e))?;
        states.push(DensityMatrix::from_trusted(Operator::new(mat)?));
    }
    Ok(Trajectory {
        times: times.to_vec(),
        drive: Some(times.iter().map(|&t| family.xi(t)).collect()),
        states,
    })
}

/// Settings for [`evolve_banded_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandedOptions {
    /// Radau steps per grid interval.
    pub substeps: usize,
    /// Blocks whose total bandwidth `lower + upper + 1` exceeds this are
    /// rejected.
    pub max_bandwidth: usize,
    /// Certify positivity at every grid point (a Cholesky factorisation,
    /// the dominant cost at large dimension).
    pub check_positivity: bool,
}

impl Default for BandedOptions {
    fn default() -> Self {
        Self {
            substeps: 10,
            max_bandwidth: 9,
            check_positivity: true,
        }
    }
}

enum ShiftedSolver {
    Banded(BandedLu),
    Dense(nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl ShiftedSolver {
    fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        match self {
            Self::Banded(lu) => {
                let mut x = rhs.to_vec();
                lu.solve_in_place(&mut x);
                x
            }
            Self::Dense(lu) => {
                let b = DVector::from_column_slice(rhs);
                lu.solve(&b)
                    .expect("shifted generator checked invertible")
                    .as_slice()
                    .to_vec()
            }
        }
    }
}

struct BandedBlock {
    indices: Vec<usize>,
    entries: Vec<(usize, usize, C64)>,
    lower: usize,
    upper: usize,
    solvers: Option<(f64, Vec<ShiftedSolver>)>,
}

impl BandedBlock {
    fn solvers(&mut self, h: f64, poles: &[(C64, C64); 3]) -> Result<&[ShiftedSolver]> {
        let fresh = matches!(&self.solvers, Some((cached, _)) if (cached - h).abs() <= 1e-14 * h);
        if !fresh {
            let n = self.indices.len();
            let mut list = Vec::with_capacity(3);
            for &(pole, _) in poles {
                let solver = match BandedLu::factor_shifted(
                    n,
                    self.lower,
                    self.upper,
                    &self.entries,
                    pole,
                    h,
                ) {
                    Ok(lu) => ShiftedSolver::Banded(lu),
                    Err(_) => {
                        let mut m = DMatrix::from_diagonal_element(n, n, pole);
                        for &(i, j, x) in &self.entries {
                            m[(i, j)] -= x * h;
                        }
                        let lu = m.lu();
                        if !lu.is_invertible() {
                            return Err(Error::Numerical(
                                "shifted generator block is singular".into(),
                            ));
                        }
                        ShiftedSolver::Dense(lu)
                    }
                };
                list.push(solver);
            }
            self.solvers = Some((h, list));
        }
        Ok(&self.solvers.as_ref().expect("set above").1)
    }
}

/// Banded Radau propagation for large truncations. `observe` receives the
/// grid index, time and state at every grid point, starting with the
/// initial state, and returns `false` to stop early. Only one state is held
/// in memory at a time.
pub fn evolve_banded_with<F>(
    gen: &GklsGenerator,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &BandedOptions,
    tol: &Tolerances,
    mut observe: F,
) -> Result<()>
where
    F: FnMut(usize, f64, &DensityMatrix) -> Result<bool>,
{
    validate_grid(times)?;
    gen.hamiltonian().ensure_same_dim(rho0.op())?;
    if opts.substeps == 0 {
        return Err(Error::InvalidParameter("substeps must be positive".into()));
    }
    let dim = gen.dim();
    let l = gen.schrodinger_super();
    let mut blocks = Vec::new();
    for indices in l.blocks() {
        let (entries, lower, upper) = l.banded_block(&indices);
        if lower + upper + 1 > opts.max_bandwidth {
            return Err(Error::InvalidParameter(format!(
                "invariant block of size {} has bandwidth {} > {}",
                indices.len(),
                lower + upper + 1,
                opts.max_bandwidth
            )));
        }
        blocks.push(BandedBlock {
            indices,
            entries,
            lower,
            upper,
            solvers: None,
        });
    }
    let poles = radau_partial_fractions();
    let mut v = rho0.op().vectorize();
    if !observe(0, times[0], rho0)? {
        return Ok(());
    }
    for k in 1..times.len() {
        let h = (times[k] - times[k - 1]) / opts.substeps as f64;
        for block in &mut blocks {
            let mut local: Vec<C64> = block.indices.iter().map(|&g| v[g]).collect();
            if local.iter().all(|z| *z == ZERO) {
                continue;
            }
            let solvers = block.solvers(h, &poles)?;
            for _ in 0..opts.substeps {
                let mut next = vec![ZERO; local.len()];
                for (solver, &(_, residue)) in solvers.iter().zip(poles.iter()) {
                    let part = solver.solve(&local);
                    for (acc, x) in next.iter_mut().zip(part) {
                        *acc += residue * x;
                    }
                }
                local = next;
            }
            for (&g, x) in block.indices.iter().zip(local) {
                v[g] = x;
            }
        }
        let mat = to_state(dim, &v);
        if opts.check_positivity {
            check_state(&mat, tol)
        } else {
            check_trace_and_hermiticity(&mat, tol)
        }
        .map_err(|e| drift(k, e))?;
        let rho = DensityMatrix::from_trusted(Operator::new(mat)?);
        if !observe(k, times[k], &rho)? {
            break;
        }
    }
    Ok(())
}

/// [`evolve_banded_with`] collecting every state.
pub fn evolve_banded(
    gen: &GklsGenerator,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &BandedOptions,
    tol: &Tolerances,
) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(times.len());
    evolve_banded_with(gen, rho0, times, opts, tol, |_, _, rho| {
        states.push(rho.clone());
        Ok(true)
    })?;
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        drive: None,
    })
}
