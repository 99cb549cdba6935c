//! Chain complexes of free modules with sparse boundary matrices.
//!
//! Degrees run from 0 to `top_degree()`. `boundary(k)` is the matrix of
//! `d_k : C_k → C_{k-1}` with rows indexed by the basis of `C_{k-1}` and
//! columns by the basis of `C_k`; `boundary(0)` is the empty `0 × dim C_0`
//! matrix.

mod bareiss;
mod homology;
mod rank;
mod snf;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use ibig::IBig;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Specialization, VarSet};
use crate::modp;
use crate::partitions::OrderedPartition;

pub use bareiss::exact_rank;
pub use homology::{
    betti_at, betti_mod_p, generic_betti, integral_homology, HomologyReport, Method,
};
pub use rank::rank_fp;
pub use snf::smith_normal_form;

/// Exact coefficient types a complex can carry.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn add_assign_ref(&mut self, other: &Self);
    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self);
    fn neg_ref(&self) -> Self;
}

impl Scalar for IBig {
    fn is_zero(&self) -> bool {
        *self == IBig::from(0)
    }
    fn zero_like(&self) -> Self {
        IBig::from(0)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

impl Scalar for LaurentPoly {
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        LaurentPoly::zero(self.vars())
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self = &*self + other;
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        LaurentPoly::add_product(self, a, b);
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

/// Coefficient ring descriptor.
#[derive(Debug, Clone, PartialEq)]
pub enum Ring {
    Integer,
    Laurent(Arc<VarSet>),
    PrimeField(u64),
}

impl Ring {
    pub fn describe(&self) -> String {
        match self {
            Ring::Integer => "integer".to_string(),
            Ring::Laurent(v) => v.describe(),
            Ring::PrimeField(p) => format!("fp:{p}"),
        }
    }
}

impl Serialize for Ring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.describe())
    }
}

/// Triplet-stored sparse matrix; no duplicate positions, no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    /// Build from triplets, summing duplicates and dropping zeros. Entries end
    /// up sorted by `(row, col)`.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Self {
        let mut acc: HashMap<(usize, usize), T> = HashMap::new();
        for (i, j, v) in triplets {
            assert!(
                i < rows && j < cols,
                "entry ({i}, {j}) outside {rows}x{cols}"
            );
            match acc.get_mut(&(i, j)) {
                Some(x) => x.add_assign_ref(&v),
                None => {
                    acc.insert((i, j), v);
                }
            }
        }
        let mut entries: Vec<_> = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((i, j), v)| (i, j, v))
            .collect();
        entries.sort_by_key(|e| (e.0, e.1));
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&T> {
        self.entries
            .binary_search_by_key(&(i, j), |e| (e.0, e.1))
            .ok()
            .map(|k| &self.entries[k].2)
    }

    /// Exact product `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut by_col: Vec<Vec<(usize, &T)>> = vec![Vec::new(); self.cols];
        for (i, l, a) in &self.entries {
            by_col[*l].push((*i, a));
        }
        let mut acc: HashMap<(usize, usize), T> = HashMap::new();
        for (l, j, b) in &rhs.entries {
            for &(i, a) in &by_col[*l] {
                acc.entry((i, *j))
                    .or_insert_with(|| a.zero_like())
                    .add_product(a, b);
            }
        }
        let mut entries: Vec<_> = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((i, j), v)| (i, j, v))
            .collect();
        entries.sort_by_key(|e| (e.0, e.1));
        Self {
            rows: self.rows,
            cols: rhs.cols,
            entries,
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SparseMatrix<U> {
        SparseMatrix::from_triplets(
            self.rows,
            self.cols,
            self.entries.iter().map(|(i, j, v)| (*i, *j, f(v))),
        )
    }

    /// Keep only rows and columns selected by the masks, reindexed in order.
    pub fn restrict(&self, keep_rows: &[bool], keep_cols: &[bool]) -> Self {
        let remap = |mask: &[bool]| {
            let mut next = 0;
            mask.iter()
                .map(|&k| {
                    if k {
                        next += 1;
                        Some(next - 1)
                    } else {
                        None
                    }
                })
                .collect::<Vec<_>>()
        };
        let (rmap, cmap) = (remap(keep_rows), remap(keep_cols));
        let rows = keep_rows.iter().filter(|&&k| k).count();
        let cols = keep_cols.iter().filter(|&&k| k).count();
        let entries = self
            .entries
            .iter()
            .filter_map(|(i, j, v)| Some((rmap[*i]?, cmap[*j]?, v.clone())))
            .collect();
        Self {
            rows,
            cols,
            entries,
        }
    }
}

impl SparseMatrix<LaurentPoly> {
    pub fn specialize(&self, at: &Specialization) -> FpMatrix {
        FpMatrix::from_triplets(
            self.rows,
            self.cols,
            at.prime(),
            self.entries
                .iter()
                .map(|(i, j, v)| (*i, *j, v.evaluate(at))),
        )
    }
}

impl SparseMatrix<IBig> {
    pub fn reduce_mod(&self, p: u64) -> FpMatrix {
        FpMatrix::from_triplets(
            self.rows,
            self.cols,
            p,
            self.entries
                .iter()
                .map(|(i, j, v)| (*i, *j, modp::reduce_int(v, p))),
        )
    }
}

/// Sparse matrix over `F_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    prime: u64,
    entries: Vec<(usize, usize, u64)>,
}

impl FpMatrix {
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        prime: u64,
        triplets: impl IntoIterator<Item = (usize, usize, u64)>,
    ) -> Self {
        let mut acc: HashMap<(usize, usize), u64> = HashMap::new();
        for (i, j, v) in triplets {
            assert!(
                i < rows && j < cols,
                "entry ({i}, {j}) outside {rows}x{cols}"
            );
            let e = acc.entry((i, j)).or_insert(0);
            *e = modp::add_mod(*e, v % prime, prime);
        }
        let mut entries: Vec<_> = acc
            .into_iter()
            .filter(|&(_, v)| v != 0)
            .map(|((i, j), v)| (i, j, v))
            .collect();
        entries.sort_unstable();
        Self {
            rows,
            cols,
            prime,
            entries,
        }
    }

    pub fn from_dense(prime: u64, rows: &[Vec<u64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_triplets(
            rows.len(),
            cols,
            prime,
            rows.iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v))),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn entries(&self) -> &[(usize, usize, u64)] {
        &self.entries
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        assert_eq!(self.prime, rhs.prime);
        let p = self.prime;
        let mut by_col: Vec<Vec<(usize, u64)>> = vec![Vec::new(); self.cols];
        for &(i, l, a) in &self.entries {
            by_col[l].push((i, a));
        }
        let trip = rhs.entries.iter().flat_map(|&(l, j, b)| {
            by_col[l]
                .iter()
                .map(move |&(i, a)| (i, j, modp::mul_mod(a, b, p)))
        });
        let trip: Vec<_> = trip.collect();
        Self::from_triplets(self.rows, rhs.cols, p, trip)
    }
}

/// Graded basis plus boundary matrices, optionally filtered by cell height.
#[derive(Debug, Clone)]
pub struct ChainComplex<T> {
    ring: Ring,
    basis: Vec<Vec<OrderedPartition>>,
    heights: Option<Vec<Vec<usize>>>,
    boundaries: Vec<SparseMatrix<T>>,
}

impl<T: Scalar> ChainComplex<T> {
    /// `boundaries[k]` is `d_k`; `boundaries[0]` may be omitted (it is
    /// rebuilt as the zero map).
    pub fn new(
        ring: Ring,
        basis: Vec<Vec<OrderedPartition>>,
        heights: Option<Vec<Vec<usize>>>,
        mut boundaries: Vec<SparseMatrix<T>>,
    ) -> Result<Self> {
        if boundaries.len() + 1 == basis.len() {
            boundaries.insert(0, SparseMatrix::zeros(0, basis.first().map_or(0, Vec::len)));
        }
        if boundaries.len() != basis.len() {
            return Err(Error::usage("one boundary matrix per degree required"));
        }
        for (k, d) in boundaries.iter().enumerate() {
            let rows = if k == 0 { 0 } else { basis[k - 1].len() };
            if d.rows != rows || d.cols != basis[k].len() {
                return Err(Error::usage(format!(
                    "d_{k} is {}x{}, expected {}x{}",
                    d.rows,
                    d.cols,
                    rows,
                    basis[k].len()
                )));
            }
        }
        if let Some(h) = &heights {
            if h.len() != basis.len() || h.iter().zip(&basis).any(|(h, b)| h.len() != b.len()) {
                return Err(Error::usage("one height per basis cell required"));
            }
        }
        Ok(Self {
            ring,
            basis,
            heights,
            boundaries,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Number of degrees (`top_degree + 1`).
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.iter().all(Vec::is_empty)
    }

    pub fn top_degree(&self) -> usize {
        self.basis.len().saturating_sub(1)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }

    pub fn basis(&self, k: usize) -> &[OrderedPartition] {
        self.basis.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn heights(&self) -> Option<&[Vec<usize>]> {
        self.heights.as_deref()
    }

    pub fn height(&self, k: usize, i: usize) -> Option<usize> {
        self.heights.as_ref().map(|h| h[k][i])
    }

    pub fn max_height(&self) -> Option<usize> {
        self.heights
            .as_ref()
            .map(|h| h.iter().flatten().copied().max().unwrap_or(0))
    }

    pub fn boundary(&self, k: usize) -> &SparseMatrix<T> {
        &self.boundaries[k]
    }

    pub fn boundaries(&self) -> &[SparseMatrix<T>] {
        &self.boundaries
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims()
            .iter()
            .enumerate()
            .map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// `profile[k][p]` counts the cells of degree `k` and height `p`.
    pub fn height_profile(&self) -> Option<Vec<Vec<usize>>> {
        let max = self.max_height()?;
        let h = self.heights.as_ref()?;
        Some(
            h.iter()
                .map(|deg| {
                    (0..=max)
                        .map(|p| deg.iter().filter(|&&x| x == p).count())
                        .collect()
                })
                .collect(),
        )
    }

    /// The filtration quotient `F_p / F_{p-1}`: cells of height exactly `p`,
    /// with every boundary entry into a lower height dropped.
    pub fn stratum(&self, p: usize) -> Result<Self> {
        let heights = self
            .heights
            .as_ref()
            .ok_or_else(|| Error::usage("stratum requires a filtered complex"))?;
        let masks: Vec<Vec<bool>> = heights
            .iter()
            .map(|deg| deg.iter().map(|&h| h == p).collect())
            .collect();
        let basis = self
            .basis
            .iter()
            .zip(&masks)
            .map(|(b, m)| {
                b.iter()
                    .zip(m)
                    .filter(|(_, &k)| k)
                    .map(|(c, _)| c.clone())
                    .collect()
            })
            .collect::<Vec<Vec<_>>>();
        let new_heights = basis.iter().map(|b: &Vec<_>| vec![p; b.len()]).collect();
        let boundaries = (0..self.len())
            .map(|k| {
                let rows = if k == 0 {
                    Vec::new()
                } else {
                    masks[k - 1].clone()
                };
                self.boundaries[k].restrict(&rows, &masks[k])
            })
            .collect();
        Self::new(self.ring.clone(), basis, Some(new_heights), boundaries)
    }

    /// Replace every entry, keeping basis and filtration.
    pub fn map_entries<U: Scalar>(&self, ring: Ring, f: impl Fn(&T) -> U) -> ChainComplex<U> {
        ChainComplex {
            ring,
            basis: self.basis.clone(),
            heights: self.heights.clone(),
            boundaries: self.boundaries.iter().map(|d| d.map(&f)).collect(),
        }
    }

    /// Flip the sign of one boundary entry (mutation testing).
    pub fn with_negated_entry(&self, k: usize, idx: usize) -> Self {
        let mut out = self.clone();
        let e = &mut out.boundaries[k].entries[idx];
        e.2 = e.2.neg_ref();
        out
    }

    /// Whether a nonzero entry ever raises the height.
    pub fn filtration_respected(&self) -> bool {
        let Some(h) = &self.heights else { return true };
        (1..self.len()).all(|k| {
            self.boundaries[k]
                .entries
                .iter()
                .all(|(i, j, _)| h[k - 1][*i] <= h[k][*j])
        })
    }
}

/// `d_k ∘ d_{k+1} = 0` for every `k`, in exact arithmetic.
pub fn check_d_squared<T: Scalar>(c: &ChainComplex<T>) -> bool {
    (1..c.len().saturating_sub(1)).all(|k| c.boundary(k).mul(c.boundary(k + 1)).is_zero())
}

pub type LaurentComplex = ChainComplex<LaurentPoly>;
pub type IntegerComplex = ChainComplex<IBig>;

impl LaurentComplex {
    pub fn vars(&self) -> &Arc<VarSet> {
        match &self.ring {
            Ring::Laurent(v) => v,
            _ => unreachable!("Laurent complex with a non-Laurent ring tag"),
        }
    }

    /// Evaluate every boundary entry at a point.
    pub fn specialize(&self, at: &Specialization) -> Vec<FpMatrix> {
        self.boundaries.iter().map(|d| d.specialize(at)).collect()
    }

    /// Image under every variable ↦ 1.
    pub fn augment(&self) -> IntegerComplex {
        self.map_entries(Ring::Integer, LaurentPoly::augmentation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> IBig {
        IBig::from(v)
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = SparseMatrix::from_triplets(
            2,
            2,
            vec![
                (0, 0, int(1)),
                (0, 0, int(-1)),
                (1, 1, int(2)),
                (1, 1, int(3)),
            ],
        );
        assert_eq!(m.entries(), &[(1, 1, int(5))]);
    }

    #[test]
    fn zero_complex_squares_to_zero() {
        let c: IntegerComplex =
            ChainComplex::new(Ring::Integer, vec![vec![]], None, vec![]).unwrap();
        assert!(check_d_squared(&c));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let basis = vec![vec![], vec![]];
        let bad = vec![SparseMatrix::<IBig>::zeros(0, 0), SparseMatrix::zeros(1, 0)];
        assert!(ChainComplex::new(Ring::Integer, basis, None, bad).is_err());
    }
}
