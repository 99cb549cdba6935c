//! Builders for the Salvetti complex of the braid arrangement and its
//! abelian covers.
//!
//! All complexes share the basis of ordered partitions; they differ in the
//! coefficient of a facet:
//!
//! * `ch`: the sign `(-1)^(l + sgn)` from [`facets`];
//! * `chlog`: the sign times `∏ t_ij` over pairs `i < j`, `i ≺ j`, with `i`
//!   landing in the left piece and `j` in the right piece;
//! * `tchlog`: the `chlog` boundary restricted to cells where the piece
//!   containing 1 precedes the piece containing 2, over the ring without
//!   `t_12` and filtered by [`height`];
//! * `chlog-s`: the `chlog` construction on a subset `S ∋ 2` of labels.
//!
//! Every nonzero entry is `±` a product of distinct variables.

use std::sync::Arc;

use ibig::IBig;

use crate::complex::{ChainComplex, IntegerComplex, LaurentComplex, Ring, Scalar, SparseMatrix};
use crate::error::{Error, Result};
use crate::laurent::{normalize_subset, LaurentPoly, VarSet};
use crate::partitions::{
    enumerate_cells_where, facets, height, CellIndex, Facet, OrderedPartition,
};

fn build<T, P, F>(
    ground: &[u8],
    max_degree: usize,
    ring: Ring,
    admissible: P,
    coefficient: F,
    filtered: bool,
) -> Result<ChainComplex<T>>
where
    T: Scalar,
    P: Fn(&[Vec<u8>], &[u8]) -> bool,
    F: Fn(&Facet, &[u8]) -> Result<T>,
{
    let mut indices = Vec::with_capacity(max_degree + 1);
    for k in 0..=max_degree {
        indices.push(CellIndex::new(enumerate_cells_where(
            ground,
            k,
            &admissible,
        )?));
    }
    let mut boundaries = vec![SparseMatrix::zeros(0, indices[0].len())];
    for k in 1..=max_degree {
        let mut trip = Vec::new();
        for (col, cell) in indices[k].cells().iter().enumerate() {
            for f in facets(cell) {
                let row = indices[k - 1].id(&f.cell).ok_or_else(|| {
                    Error::usage(format!("facet {} of {} is not admissible", f.cell, cell))
                })?;
                let piece = &cell.pieces()[f.piece - 1];
                trip.push((row.0, col, coefficient(&f, piece)?));
            }
        }
        boundaries.push(SparseMatrix::from_triplets(
            indices[k - 1].len(),
            indices[k].len(),
            trip,
        ));
    }
    let basis: Vec<Vec<OrderedPartition>> = indices.iter().map(|ix| ix.cells().to_vec()).collect();
    let heights = filtered.then(|| {
        basis
            .iter()
            .map(|deg| deg.iter().map(height).collect())
            .collect()
    });
    ChainComplex::new(ring, basis, heights, boundaries)
}

fn check_n(n: usize) -> Result<Vec<u8>> {
    if !(2..=9).contains(&n) {
        return Err(Error::usage(format!("n must lie in 2..=9, got {n}")));
    }
    Ok((1..=n as u8).collect())
}

/// `Ch(n)` over ℤ, filtered by height.
pub fn build_ch(n: usize) -> Result<IntegerComplex> {
    let ground = check_n(n)?;
    build(
        &ground,
        n - 1,
        Ring::Integer,
        |_, _| true,
        |f, _| Ok(IBig::from(f.sign)),
        true,
    )
}

fn log_coefficient(vars: &Arc<VarSet>) -> impl Fn(&Facet, &[u8]) -> Result<LaurentPoly> + '_ {
    move |f, piece| LaurentPoly::signed_product(vars, f.sign, &f.log_pairs(piece))
}

/// `Ch^log(n)` over `R(n)` in the basis of cells with zero offsets.
pub fn build_chlog(n: usize) -> Result<LaurentComplex> {
    let ground = check_n(n)?;
    let vars = VarSet::full(n);
    build(
        &ground,
        n - 1,
        Ring::Laurent(vars.clone()),
        |_, _| true,
        log_coefficient(&vars),
        true,
    )
}

/// Whether appending `next` keeps 1 and 2 in distinct pieces with 1 first.
pub fn admissible_step(prefix: &[Vec<u8>], next: &[u8]) -> bool {
    let has1 = next.contains(&1);
    let has2 = next.contains(&2);
    if has1 && has2 {
        return false;
    }
    !has2 || prefix.iter().any(|p| p.contains(&1))
}

/// The piece containing 1 strictly precedes the piece containing 2.
pub fn is_admissible(cell: &OrderedPartition) -> bool {
    match (cell.piece_of(1), cell.piece_of(2)) {
        (Some(a), Some(b)) => a < b,
        _ => false,
    }
}

/// `t̃Ch^log(n)` over `R̃(n)` on the admissible basis, filtered by height.
///
/// The ring has no `t_12`, so a facet that would need it fails to build;
/// admissible cells never split 1 from 2.
pub fn build_tchlog(n: usize) -> Result<LaurentComplex> {
    let ground = check_n(n)?;
    let vars = VarSet::tilde(n);
    build(
        &ground,
        n - 2,
        Ring::Laurent(vars.clone()),
        admissible_step,
        log_coefficient(&vars),
        true,
    )
}

/// `Ch^{log,S}` over `R(S)` for `2 ∈ S ⊆ {2..n}`.
pub fn build_chlog_s(n: usize, subset: &[u8]) -> Result<LaurentComplex> {
    check_n(n)?;
    let ground = normalize_subset(n, subset)?;
    let vars = VarSet::on_subset(n, &ground)?;
    build(
        &ground,
        ground.len() - 1,
        Ring::Laurent(vars.clone()),
        |_, _| true,
        log_coefficient(&vars),
        false,
    )
}

/// The covering projection `Ch^log → Ch`: every variable ↦ 1.
pub fn project_to_ch(c: &LaurentComplex) -> IntegerComplex {
    c.augment()
}

/// Every entry is `±` a product of distinct variables with exponent 1.
pub fn entries_are_signed_squarefree_monomials(c: &LaurentComplex) -> bool {
    c.boundaries().iter().all(|d| {
        d.entries().iter().all(|(_, _, v)| {
            v.as_monomial().is_some_and(|(e, coef)| {
                (*coef == IBig::from(1) || *coef == IBig::from(-1))
                    && e.iter().all(|&x| x == 0 || x == 1)
            })
        })
    })
}
