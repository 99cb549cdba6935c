//! The discrete Morse matching on the admissible basis and the reduced
//! complex on its critical cells.
//!
//! For a cell with `l = ι(cell)`:
//!
//! * critical: `l = 1` and 1 is last in its piece;
//! * collapsible: 1 is not last in its piece. Its redundant partner splits
//!   that piece into the elements after 1 (left) and the elements up to 1
//!   (right);
//! * redundant: `l ≥ 2` and 1 is last in its piece. Its collapsible partner
//!   concatenates piece `l` in front of piece `l - 1`.
//!
//! A collapsible cell has one piece fewer than its partner, so it sits one
//! degree higher.

use std::collections::{HashMap, HashSet};

use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::braid::build_tchlog;
use crate::complex::{betti_at, ChainComplex, LaurentComplex, SparseMatrix};
use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Specialization};
use crate::partitions::{height, iota, CellId, CellIndex, OrderedPartition};

/// Role of a cell under the matching, computed from the cell alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellClass {
    Critical,
    Collapsible(OrderedPartition),
    Redundant(OrderedPartition),
}

pub fn classify(cell: &OrderedPartition) -> CellClass {
    let l = iota(cell);
    let pieces = cell.pieces();
    let piece = &pieces[l - 1];
    let pos = piece.iter().position(|&x| x == 1).unwrap();
    let last = pos + 1 == piece.len();
    if l == 1 && last {
        return CellClass::Critical;
    }
    let mut out: Vec<Vec<u8>> = Vec::with_capacity(pieces.len() + 1);
    if !last {
        out.extend_from_slice(&pieces[..l - 1]);
        out.push(piece[pos + 1..].to_vec());
        out.push(piece[..=pos].to_vec());
        out.extend_from_slice(&pieces[l..]);
        CellClass::Collapsible(OrderedPartition::from_pieces_unchecked(out))
    } else {
        out.extend_from_slice(&pieces[..l - 2]);
        let mut merged = piece.clone();
        merged.extend_from_slice(&pieces[l - 2]);
        out.push(merged);
        out.extend_from_slice(&pieces[l..]);
        CellClass::Redundant(OrderedPartition::from_pieces_unchecked(out))
    }
}

/// Per-cell tag with the partner's id in the adjacent degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "tag", content = "partner")]
pub enum MorseTag {
    Critical,
    /// Matched with a redundant cell one degree lower.
    Collapsible(usize),
    /// Matched with a collapsible cell one degree higher.
    Redundant(usize),
}

impl MorseTag {
    pub fn name(&self) -> &'static str {
        match self {
            MorseTag::Critical => "critical",
            MorseTag::Collapsible(_) => "collapsible",
            MorseTag::Redundant(_) => "redundant",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseClassification {
    tags: Vec<Vec<MorseTag>>,
}

impl MorseClassification {
    /// Classify every basis cell; a partner missing from the basis is an error.
    pub fn of(c: &LaurentComplex) -> Result<Self> {
        let index: Vec<CellIndex> = (0..c.len())
            .map(|k| CellIndex::new(c.basis(k).to_vec()))
            .collect();
        let lookup = |k: Option<usize>, cell: &OrderedPartition| -> Result<usize> {
            k.and_then(|k| index.get(k))
                .and_then(|ix| ix.id(cell))
                .map(|CellId(i)| i)
                .ok_or_else(|| Error::usage(format!("matching partner {cell} is not a basis cell")))
        };
        let mut tags = Vec::with_capacity(c.len());
        for k in 0..c.len() {
            let mut deg = Vec::with_capacity(c.basis(k).len());
            for cell in c.basis(k) {
                deg.push(match classify(cell) {
                    CellClass::Critical => MorseTag::Critical,
                    CellClass::Collapsible(p) => {
                        MorseTag::Collapsible(lookup(k.checked_sub(1), &p)?)
                    }
                    CellClass::Redundant(p) => MorseTag::Redundant(lookup(Some(k + 1), &p)?),
                });
            }
            tags.push(deg);
        }
        Ok(Self { tags })
    }

    pub fn from_tags(tags: Vec<Vec<MorseTag>>) -> Self {
        Self { tags }
    }

    pub fn tags(&self) -> &[Vec<MorseTag>] {
        &self.tags
    }

    pub fn tag(&self, k: usize, i: usize) -> MorseTag {
        self.tags[k][i]
    }

    pub fn critical_per_degree(&self) -> Vec<usize> {
        self.tags
            .iter()
            .map(|d| d.iter().filter(|t| **t == MorseTag::Critical).count())
            .collect()
    }

    /// Matched pairs `(degree of redundant cell, redundant, collapsible)`.
    pub fn pairs(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (k, deg) in self.tags.iter().enumerate() {
            for (i, t) in deg.iter().enumerate() {
                if let MorseTag::Redundant(c) = t {
                    out.push((k, i, *c));
                }
            }
        }
        out
    }

    /// Exchange the partners of two redundant cells in degree `k` (and make
    /// the collapsible side consistent). Used to build corrupted matchings.
    pub fn swap_redundant_partners(&mut self, k: usize, a: usize, b: usize) {
        let (MorseTag::Redundant(ca), MorseTag::Redundant(cb)) = (self.tags[k][a], self.tags[k][b])
        else {
            panic!("both cells must be redundant");
        };
        self.tags[k][a] = MorseTag::Redundant(cb);
        self.tags[k][b] = MorseTag::Redundant(ca);
        self.tags[k + 1][cb] = MorseTag::Collapsible(a);
        self.tags[k + 1][ca] = MorseTag::Collapsible(b);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingReport {
    pub n: usize,
    pub critical_per_degree: Vec<usize>,
    pub acyclic: bool,
    pub involution: bool,
    pub invertible_indices: bool,
    pub equal_heights: bool,
    /// Along every redundant ↗ collapsible ↘ redundant step inside one
    /// height, ι drops by exactly one.
    pub iota_monotone: bool,
    pub pass: bool,
    pub failures: Vec<String>,
}

/// Check the matching on `t̃Ch^log(n)`.
pub fn verify_matching(n: usize) -> Result<MatchingReport> {
    let c = build_tchlog(n)?;
    let m = MorseClassification::of(&c)?;
    Ok(verify_matching_of(n, &c, &m))
}

/// Check an arbitrary matching on a filtered complex.
pub fn verify_matching_of(n: usize, c: &LaurentComplex, m: &MorseClassification) -> MatchingReport {
    let mut failures = Vec::new();
    let label = |k: usize, i: usize| format!("[{}] (degree {k})", c.basis(k)[i]);

    let mut involution = true;
    let mut invertible = true;
    let mut equal_heights = true;
    for (k, deg) in m.tags().iter().enumerate() {
        for (i, t) in deg.iter().enumerate() {
            match *t {
                MorseTag::Redundant(j) => {
                    let ok =
                        m.tags.get(k + 1).and_then(|d| d.get(j)) == Some(&MorseTag::Collapsible(i));
                    if !ok {
                        involution = false;
                        failures.push(format!(
                            "partner of redundant {} does not point back",
                            label(k, i)
                        ));
                        continue;
                    }
                    match c.boundary(k + 1).get(i, j) {
                        Some(v) if v.is_unit() => {}
                        other => {
                            invertible = false;
                            failures.push(format!(
                                "index [{} : {}] = {} is not a unit",
                                label(k + 1, j),
                                label(k, i),
                                other.map_or("0".to_string(), ToString::to_string)
                            ));
                        }
                    }
                    if c.height(k, i) != c.height(k + 1, j) {
                        equal_heights = false;
                        failures.push(format!(
                            "{} and its partner have different heights",
                            label(k, i)
                        ));
                    }
                }
                MorseTag::Collapsible(j) => {
                    let ok = k > 0 && m.tags[k - 1].get(j) == Some(&MorseTag::Redundant(i));
                    if !ok {
                        involution = false;
                        failures.push(format!(
                            "partner of collapsible {} does not point back",
                            label(k, i)
                        ));
                    }
                }
                MorseTag::Critical => {}
            }
        }
    }

    let cycle = find_flow_cycle(c, m);
    if let Some((k, i)) = cycle {
        failures.push(format!(
            "modified flow graph has a cycle through {}",
            label(k, i)
        ));
    }
    let iota_monotone = check_iota_steps(c, m, &mut failures);

    let acyclic = cycle.is_none();
    let pass = acyclic && involution && invertible && equal_heights && iota_monotone;
    MatchingReport {
        n,
        critical_per_degree: m.critical_per_degree(),
        acyclic,
        involution,
        invertible_indices: invertible,
        equal_heights,
        iota_monotone,
        pass,
        failures,
    }
}

/// Cycle detection on the Hasse diagram with boundary arcs pointing down and
/// matched arcs reversed.
fn find_flow_cycle(c: &LaurentComplex, m: &MorseClassification) -> Option<(usize, usize)> {
    let mut g: DiGraph<(usize, usize), ()> = DiGraph::new();
    let nodes: Vec<Vec<NodeIndex>> = (0..c.len())
        .map(|k| (0..c.basis(k).len()).map(|i| g.add_node((k, i))).collect())
        .collect();
    for k in 1..c.len() {
        for (row, col, _) in c.boundary(k).entries() {
            let matched = m.tag(k - 1, *row) == MorseTag::Redundant(*col);
            let (from, to) = (nodes[k][*col], nodes[k - 1][*row]);
            if matched {
                g.add_edge(to, from, ());
            } else {
                g.add_edge(from, to, ());
            }
        }
    }
    toposort(&g, None).err().map(|cyc| g[cyc.node_id()])
}

fn check_iota_steps(
    c: &LaurentComplex,
    m: &MorseClassification,
    failures: &mut Vec<String>,
) -> bool {
    let mut ok = true;
    for (k, r, col) in m.pairs() {
        if m.tags[k + 1].get(col) != Some(&MorseTag::Collapsible(r)) {
            continue;
        }
        let d = c.boundary(k + 1);
        let h = c.height(k, r);
        let start = iota(&c.basis(k)[r]);
        for (row, j, _) in d.entries() {
            if *j != col || *row == r || c.height(k, *row) != h {
                continue;
            }
            if let MorseTag::Redundant(_) = m.tag(k, *row) {
                let end = iota(&c.basis(k)[*row]);
                if end + 1 != start {
                    ok = false;
                    failures.push(format!(
                        "ι does not drop by one from [{}] to [{}]",
                        c.basis(k)[r],
                        c.basis(k)[*row]
                    ));
                }
            }
        }
    }
    ok
}

/// The filtered complex on critical cells.
#[derive(Debug, Clone)]
pub struct MorseComplex {
    pub n: usize,
    pub complex: LaurentComplex,
}

impl MorseComplex {
    pub fn complex(&self) -> &LaurentComplex {
        &self.complex
    }
}

/// Working copy of one boundary matrix with row and column access.
struct Work {
    cols: Vec<HashMap<usize, LaurentPoly>>,
    rows: Vec<HashSet<usize>>,
}

impl Work {
    fn new(d: &SparseMatrix<LaurentPoly>) -> Self {
        let mut cols = vec![HashMap::new(); d.cols()];
        let mut rows = vec![HashSet::new(); d.rows()];
        for (i, j, v) in d.entries() {
            cols[*j].insert(*i, v.clone());
            rows[*i].insert(*j);
        }
        Self { cols, rows }
    }

    fn drop_row(&mut self, r: usize) {
        for x in std::mem::take(&mut self.rows[r]) {
            self.cols[x].remove(&r);
        }
    }

    fn drop_col(&mut self, c: usize) {
        for y in std::mem::take(&mut self.cols[c]).into_keys() {
            self.rows[y].remove(&c);
        }
    }
}

/// Reduce a complex along an acyclic matching by Gaussian elimination.
///
/// Eliminating a redundant cell `r` against its collapsible partner `c`
/// with unit index `u = [∂c : r]` replaces `∂x` by `∂x - [∂x : r] u⁻¹ ∂c`
/// and deletes both cells. Pairs are processed by decreasing `ι(r)`.
pub fn reduce(c: &LaurentComplex, m: &MorseClassification) -> Result<LaurentComplex> {
    let mut work: Vec<Work> = c.boundaries().iter().map(Work::new).collect();
    let mut alive: Vec<Vec<bool>> = (0..c.len()).map(|k| vec![true; c.basis(k).len()]).collect();

    let mut pairs = m.pairs();
    pairs.sort_by_key(|&(k, r, _)| (std::cmp::Reverse(iota(&c.basis(k)[r])), k, r));

    for (k, r, col) in pairs {
        let kk = k + 1;
        let u = work[kk].cols[col].get(&r).cloned();
        let inv = u
            .as_ref()
            .and_then(LaurentPoly::unit_inverse)
            .ok_or_else(|| Error::NonInvertiblePivot {
                redundant: c.basis(k)[r].to_string(),
                collapsible: c.basis(kk)[col].to_string(),
                entry: u.map_or("0".to_string(), |v| v.to_string()),
            })?;
        let column: Vec<(usize, LaurentPoly)> = work[kk].cols[col]
            .iter()
            .filter(|(&y, _)| y != r)
            .map(|(&y, a)| (y, -&(a * &inv)))
            .collect();
        let row: Vec<(usize, LaurentPoly)> = work[kk].rows[r]
            .iter()
            .filter(|&&x| x != col)
            .map(|&x| (x, work[kk].cols[x][&r].clone()))
            .collect();
        let w = &mut work[kk];
        for (x, b) in &row {
            for (y, f) in &column {
                let entry = w.cols[*x]
                    .entry(*y)
                    .or_insert_with(|| LaurentPoly::zero(f.vars()));
                entry.add_product(f, b);
                if entry.is_zero() {
                    w.cols[*x].remove(y);
                    w.rows[*y].remove(x);
                } else {
                    w.rows[*y].insert(*x);
                }
            }
        }
        w.drop_col(col);
        w.drop_row(r);
        if kk + 1 < work.len() {
            work[kk + 1].drop_row(col);
        }
        if k >= 1 {
            work[k].drop_col(r);
        }
        alive[k][r] = false;
        alive[kk][col] = false;
    }

    let positions: Vec<Vec<Option<usize>>> = alive
        .iter()
        .map(|deg| {
            let mut next = 0;
            deg.iter()
                .map(|&a| {
                    a.then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect()
        })
        .collect();
    let basis: Vec<Vec<OrderedPartition>> = (0..c.len())
        .map(|k| {
            c.basis(k)
                .iter()
                .zip(&alive[k])
                .filter(|(_, &a)| a)
                .map(|(x, _)| x.clone())
                .collect()
        })
        .collect();
    let heights = c.heights().map(|_| {
        basis
            .iter()
            .map(|deg| deg.iter().map(height).collect())
            .collect()
    });
    let mut boundaries = Vec::with_capacity(c.len());
    for k in 0..c.len() {
        let rows = if k == 0 { 0 } else { basis[k - 1].len() };
        let mut trip = Vec::new();
        for (x, col) in work[k].cols.iter().enumerate() {
            let Some(nx) = positions[k][x] else { continue };
            for (y, v) in col {
                let ny = positions[k - 1][*y].expect("entries only between surviving cells");
                trip.push((ny, nx, v.clone()));
            }
        }
        boundaries.push(SparseMatrix::from_triplets(rows, basis[k].len(), trip));
    }
    ChainComplex::new(c.ring().clone(), basis, heights, boundaries)
}

/// The Morse complex of `t̃Ch^log(n)`.
pub fn morse_complex(n: usize) -> Result<MorseComplex> {
    let c = build_tchlog(n)?;
    let m = MorseClassification::of(&c)?;
    Ok(MorseComplex {
        n,
        complex: reduce(&c, &m)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceCheck {
    pub equal: bool,
    pub morse_betti: Vec<usize>,
    pub tchlog_betti: Vec<usize>,
    pub values: Vec<u64>,
}

/// Compare Betti numbers of both complexes at the same point.
pub fn morse_equivalence_check_of(
    tchlog: &LaurentComplex,
    morse: &MorseComplex,
    at: &Specialization,
) -> EquivalenceCheck {
    let a = betti_at(morse.complex(), at).betti;
    let b = betti_at(tchlog, at).betti;
    EquivalenceCheck {
        equal: a == b,
        morse_betti: a,
        tchlog_betti: b,
        values: at.values().to_vec(),
    }
}

pub fn morse_equivalence_check(n: usize, at: &Specialization) -> Result<EquivalenceCheck> {
    let tchlog = build_tchlog(n)?;
    let morse = morse_complex(n)?;
    Ok(morse_equivalence_check_of(&tchlog, &morse, at))
}
