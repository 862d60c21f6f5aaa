//! Linear maps on operators, stored as sparse matrices acting on
//! column-stacked vectors.
//!
//! With `vec(X)[j * D + i] = X[i, j]` the sandwich `X -> A X B` is the
//! Kronecker product `B^T (x) A`. Every superoperator here is assembled from
//! such sandwiches row by row, so the `D^2 x D^2` matrix is never formed
//! densely unless explicitly requested.

use nalgebra::{DMatrix, DVector};

use super::operator::{Operator, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Largest operator dimension for which [`SuperOperator::to_dense`] will
/// materialise the full matrix.
pub const MAX_DENSE_DIM: usize = 64;

/// Sparse `D^2 x D^2` matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

/// Non-zero pattern of one operator: entries grouped by row and by column.
struct SparsePattern {
    by_row: Vec<Vec<(usize, C64)>>,
    by_col: Vec<Vec<(usize, C64)>>,
}

impl SparsePattern {
    fn of(op: &Operator) -> Self {
        let n = op.dim();
        let mut by_row = vec![Vec::new(); n];
        let mut by_col = vec![Vec::new(); n];
        let m = op.matrix();
        for j in 0..n {
            for i in 0..n {
                let z = m[(i, j)];
                if z != ZERO {
                    by_row[i].push((j, z));
                    by_col[j].push((i, z));
                }
            }
        }
        Self { by_row, by_col }
    }
}

/// Accumulates `sum_t c_t (X -> A_t X B_t)` before assembly.
pub struct SandwichSum {
    dim: usize,
    terms: Vec<(C64, SparsePattern, SparsePattern)>,
}

impl SandwichSum {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
        }
    }

    /// Adds `X -> coeff * left * X * right`.
    pub fn add(&mut self, coeff: C64, left: &Operator, right: &Operator) -> Result<&mut Self> {
        for op in [left, right] {
            if op.dim() != self.dim {
                return Err(Error::ShapeError {
                    expected: format!("dimension {}", self.dim),
                    found: format!("dimension {}", op.dim()),
                });
            }
        }
        if coeff != ZERO {
            self.terms
                .push((coeff, SparsePattern::of(left), SparsePattern::of(right)));
        }
        Ok(self)
    }

    pub fn build(&self) -> SuperOperator {
        let d = self.dim;
        let size = d * d;
        let mut row_ptr = Vec::with_capacity(size + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut scratch: Vec<(usize, C64)> = Vec::new();
        row_ptr.push(0);
        for r in 0..size {
            let (i, j) = (r % d, r / d);
            scratch.clear();
            // (A X B)[i, j] = sum_{k,l} A[i, k] X[k, l] B[l, j]
            for (c, left, right) in &self.terms {
                for &(k, a_ik) in &left.by_row[i] {
                    let ca = c * a_ik;
                    for &(l, b_lj) in &right.by_col[j] {
                        scratch.push((l * d + k, ca * b_lj));
                    }
                }
            }
            push_merged_row(&mut scratch, &mut cols, &mut vals);
            row_ptr.push(cols.len());
        }
        SuperOperator {
            dim: d,
            row_ptr,
            cols,
            vals,
        }
    }
}

fn push_merged_row(scratch: &mut [(usize, C64)], cols: &mut Vec<usize>, vals: &mut Vec<C64>) {
    scratch.sort_unstable_by_key(|&(c, _)| c);
    let mut idx = 0;
    while idx < scratch.len() {
        let col = scratch[idx].0;
        let mut acc = ZERO;
        while idx < scratch.len() && scratch[idx].0 == col {
            acc += scratch[idx].1;
            idx += 1;
        }
        if acc != ZERO {
            cols.push(col);
            vals.push(acc);
        }
    }
}

impl SuperOperator {
    /// `X -> A X B`.
    pub fn sandwich(left: &Operator, right: &Operator) -> Result<Self> {
        let mut s = SandwichSum::new(left.dim());
        s.add(ONE, left, right)?;
        Ok(s.build())
    }

    /// `X -> A X`.
    pub fn left_mul(a: &Operator) -> Self {
        let id = Operator::identity(a.dim()).expect("dimension is positive");
        Self::sandwich(a, &id).expect("dimensions match")
    }

    /// `X -> X B`.
    pub fn right_mul(b: &Operator) -> Self {
        let id = Operator::identity(b.dim()).expect("dimension is positive");
        Self::sandwich(&id, b).expect("dimensions match")
    }

    pub fn identity(dim: usize) -> Self {
        let size = dim * dim;
        Self {
            dim,
            row_ptr: (0..=size).collect(),
            cols: (0..size).collect(),
            vals: vec![ONE; size],
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim * dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Wraps a dense `D^2 x D^2` matrix.
    pub fn from_dense(dim: usize, m: &DMatrix<C64>) -> Result<Self> {
        let size = dim * dim;
        if m.nrows() != size || m.ncols() != size {
            return Err(Error::ShapeError {
                expected: format!("{size}x{size}"),
                found: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..size {
            for c in 0..size {
                if m[(r, c)] != ZERO {
                    cols.push(c);
                    vals.push(m[(r, c)]);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(Self {
            dim,
            row_ptr,
            cols,
            vals,
        })
    }

    /// Underlying operator dimension `D`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix size `D^2`.
    pub fn size(&self) -> usize {
        self.dim * self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub(crate) fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(pos) => self.vals[range.start + pos],
            Err(_) => ZERO,
        }
    }

    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        if v.len() != self.size() {
            return Err(Error::ShapeError {
                expected: format!("vector of length {}", self.size()),
                found: format!("length {}", v.len()),
            });
        }
        Ok(DVector::from_fn(self.size(), |r, _| {
            self.row(r).fold(ZERO, |acc, (c, x)| acc + x * v[c])
        }))
    }

    pub fn apply_operator(&self, x: &Operator) -> Result<Operator> {
        if x.dim() != self.dim {
            return Err(Error::ShapeError {
                expected: format!("dimension {}", self.dim),
                found: format!("dimension {}", x.dim()),
            });
        }
        Operator::unvectorize(self.dim, &self.apply(&x.vectorize())?)
    }

    /// Conjugate transpose, the adjoint under the Hilbert-Schmidt pairing.
    pub fn adjoint(&self) -> Self {
        let size = self.size();
        let mut counts = vec![0usize; size + 1];
        for &c in &self.cols {
            counts[c + 1] += 1;
        }
        for i in 0..size {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut cols = vec![0; self.nnz()];
        let mut vals = vec![ZERO; self.nnz()];
        for r in 0..size {
            for (c, x) in self.row(r) {
                let slot = next[c];
                cols[slot] = r;
                vals[slot] = x.conj();
                next[c] += 1;
            }
        }
        Self {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= factor;
        }
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::ShapeError {
                expected: format!("superoperator on dimension {}", self.dim),
                found: format!("dimension {}", other.dim),
            });
        }
        Ok(())
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &Self, factor: C64) -> Result<Self> {
        self.check_compatible(other)?;
        let mut row_ptr = vec![0];
        let mut cols = Vec::with_capacity(self.nnz() + other.nnz());
        let mut vals = Vec::with_capacity(self.nnz() + other.nnz());
        let mut scratch = Vec::new();
        for r in 0..self.size() {
            scratch.clear();
            scratch.extend(self.row(r));
            scratch.extend(other.row(r).map(|(c, x)| (c, x * factor)));
            push_merged_row(&mut scratch, &mut cols, &mut vals);
            row_ptr.push(cols.len());
        }
        Ok(Self {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
        })
    }

    /// Matrix product `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut scratch = Vec::new();
        for r in 0..self.size() {
            scratch.clear();
            for (k, a) in self.row(r) {
                scratch.extend(other.row(k).map(|(c, b)| (c, a * b)));
            }
            push_merged_row(&mut scratch, &mut cols, &mut vals);
            row_ptr.push(cols.len());
        }
        Ok(Self {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
        })
    }

    /// Dense `D^2 x D^2` matrix; refused above [`MAX_DENSE_DIM`].
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        if self.dim > MAX_DENSE_DIM {
            return Err(Error::InvalidDimension(format!(
                "dense superoperator limited to operator dimension {MAX_DENSE_DIM}, got {}",
                self.dim
            )));
        }
        let size = self.size();
        let mut m = DMatrix::zeros(size, size);
        for r in 0..size {
            for (c, x) in self.row(r) {
                m[(r, c)] = x;
            }
        }
        Ok(m)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.vals.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_c |sum_i L[(i, i), c]|`: how far `Tr(L X)` is from vanishing
    /// for all `X`. Zero for trace-preserving Schrodinger generators.
    pub fn trace_preservation_residual(&self) -> f64 {
        let d = self.dim;
        let mut acc = vec![ZERO; self.size()];
        for i in 0..d {
            for (c, x) in self.row(i * d + i) {
                acc[c] += x;
            }
        }
        acc.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |L(I)|`. Zero for unital Heisenberg generators.
    pub fn unitality_residual(&self) -> f64 {
        let d = self.dim;
        (0..self.size())
            .map(|r| {
                self.row(r)
                    .filter(|(c, _)| c % d == c / d)
                    .fold(ZERO, |acc, (_, x)| acc + x)
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// Connected components of the sparsity graph. Each block is a sorted
    /// list of vector indices that the map never mixes with the rest, so
    /// the matrix is block diagonal after a permutation.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let size = self.size();
        let mut parent: Vec<usize> = (0..size).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for r in 0..size {
            for (c, _) in self.row(r) {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut slot = vec![usize::MAX; size];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for idx in 0..size {
            let root = find(&mut parent, idx);
            if slot[root] == usize::MAX {
                slot[root] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[slot[root]].push(idx);
        }
        blocks
    }

    /// Dense restriction to the index set `indices` (rows and columns).
    pub fn dense_block(&self, indices: &[usize]) -> DMatrix<C64> {
        let lookup = local_lookup(self.size(), indices);
        let n = indices.len();
        let mut m = DMatrix::zeros(n, n);
        for (li, &r) in indices.iter().enumerate() {
            for (c, x) in self.row(r) {
                if let Some(lj) = lookup(c) {
                    m[(li, lj)] = x;
                }
            }
        }
        m
    }

    /// Entries of the restriction to `indices` in local coordinates, plus
    /// the lower and upper bandwidth in that ordering.
    pub(crate) fn banded_block(&self, indices: &[usize]) -> (Vec<(usize, usize, C64)>, usize, usize) {
        let lookup = local_lookup(self.size(), indices);
        let mut entries = Vec::new();
        let (mut lower, mut upper) = (0usize, 0usize);
        for (li, &r) in indices.iter().enumerate() {
            for (c, x) in self.row(r) {
                if let Some(lj) = lookup(c) {
                    entries.push((li, lj, x));
                    if lj < li {
                        lower = lower.max(li - lj);
                    } else {
                        upper = upper.max(lj - li);
                    }
                }
            }
        }
        (entries, lower, upper)
    }

    /// True if no entry couples a row inside `indices` to a column outside
    /// it or vice versa.
    pub fn is_invariant_subspace(&self, indices: &[usize]) -> bool {
        let mut inside = vec![false; self.size()];
        for &i in indices {
            inside[i] = true;
        }
        (0..self.size()).all(|r| self.row(r).all(|(c, _)| inside[r] == inside[c]))
    }
}

/// Maps a global index to its position in `indices`.
fn local_lookup(size: usize, indices: &[usize]) -> impl Fn(usize) -> Option<usize> {
    let mut pos = vec![usize::MAX; size];
    for (l, &g) in indices.iter().enumerate() {
        pos[g] = l;
    }
    move |g| (pos[g] != usize::MAX).then_some(pos[g])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_op(dim: usize, rng: &mut ChaCha8Rng) -> Operator {
        Operator::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .unwrap()
    }

    #[test]
    fn left_mul_identity_is_identity() {
        let id = Operator::identity(3).unwrap();
        assert_eq!(SuperOperator::left_mul(&id), SuperOperator::identity(3));
    }

    #[test]
    fn left_and_right_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random_op(3, &mut rng);
            let x = random_op(3, &mut rng);
            let left = SuperOperator::left_mul(&a).apply_operator(&x).unwrap();
            let right = SuperOperator::right_mul(&a).apply_operator(&x).unwrap();
            assert!((&left - &(&a * &x)).max_abs() < 1e-13);
            assert!((&right - &(&x * &a)).max_abs() < 1e-13);
        }
    }

    #[test]
    fn left_and_right_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_op(3, &mut rng);
        let b = random_op(3, &mut rng);
        let la = SuperOperator::left_mul(&a);
        let rb = SuperOperator::right_mul(&b);
        let ab = la.compose(&rb).unwrap().to_dense().unwrap();
        let ba = rb.compose(&la).unwrap().to_dense().unwrap();
        assert!((ab - ba).iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn adjoint_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_op(3, &mut rng);
        let b = random_op(3, &mut rng);
        let s = SuperOperator::sandwich(&a, &b).unwrap();
        let dense = s.to_dense().unwrap();
        assert_eq!(s.adjoint().to_dense().unwrap(), dense.adjoint());
        assert_eq!(SuperOperator::from_dense(3, &dense).unwrap(), s);
    }

    #[test]
    fn blocks_of_diagonal_map_are_singletons() {
        let h = Operator::diagonal(&[0.0, 1.0]).unwrap();
        let s = SuperOperator::left_mul(&h);
        assert_eq!(s.blocks().len(), 4);
        assert!(s.is_invariant_subspace(&[0, 3]));
    }

    #[test]
    fn dense_cap() {
        assert!(SuperOperator::identity(MAX_DENSE_DIM + 1).to_dense().is_err());
    }
}
