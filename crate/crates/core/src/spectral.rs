//! Filtration strata of the Morse complex and the first page of the
//! associated spectral sequence.
//!
//! A critical cell of height `p` has first piece `(a_1, …, a_p, 1)`; the
//! remaining pieces form an ordered partition of `S = {1..n} ∖ π_1`, which
//! contains 2. This gives the block decomposition of stratum `p` into `p!`
//! copies of `Ch^{log,S}` per subset `S` of size `n - p - 1`, shifted up by
//! `p` degrees.

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use serde::Serialize;

use crate::braid::{build_chlog_s, build_tchlog};
use crate::complex::{betti_at, generic_betti, HomologyReport, LaurentComplex};
use crate::error::{Error, Result};
use crate::laurent::{
    derive_seed, random_specialization_from, tau_n, LaurentPoly, Specialization, VarSet,
};
use crate::morse::{morse_complex, MorseComplex};
use crate::partitions::{factorial, CellIndex, OrderedPartition};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub subset: Vec<u8>,
    /// The labels before 1 in the first piece, in order.
    pub prefix: Vec<u8>,
    /// Dimensions of `Ch^{log,S}`, unshifted.
    pub dims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryMismatch {
    /// Degree of the column cell in the stratum.
    pub degree: usize,
    pub row: String,
    pub col: String,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrataDecomposition {
    pub n: usize,
    pub p: usize,
    pub blocks: Vec<Block>,
    pub stratum_dims: Vec<usize>,
    /// Block dimensions add up to the stratum dimensions in every degree.
    pub dims_match: bool,
    pub mismatches: Vec<EntryMismatch>,
    pub pass: bool,
}

/// Subsets `S ∋ 2` of `{2..n}` with `|S| = size`, in lexicographic order.
pub fn subsets_with_two(n: usize, size: usize) -> Vec<Vec<u8>> {
    if size == 0 {
        return Vec::new();
    }
    (3..=n as u8)
        .combinations(size - 1)
        .map(|rest| std::iter::once(2).chain(rest).collect())
        .collect()
}

/// Split a stratum cell into `(prefix, S, residual)`.
fn split_cell(cell: &OrderedPartition) -> Option<(Vec<u8>, Vec<u8>, OrderedPartition)> {
    let pieces = cell.pieces();
    let (first, rest) = pieces.split_first()?;
    let (&last, prefix) = first.split_last()?;
    if last != 1 || rest.is_empty() {
        return None;
    }
    let mut subset: Vec<u8> = rest.iter().flatten().copied().collect();
    subset.sort_unstable();
    let residual = OrderedPartition::on_ground(&subset, rest.to_vec()).ok()?;
    Some((prefix.to_vec(), subset, residual))
}

/// Compare stratum `p` of the Morse complex with its block model.
///
/// A residual cell of degree `k` corresponds to `(-1)^k` times the stratum
/// cell; with that sign the two differentials agree entry by entry.
pub fn strata_decomposition_of(morse: &MorseComplex, p: usize) -> Result<StrataDecomposition> {
    let n = morse.n;
    if p + 2 > n {
        return Err(Error::usage(format!("height {p} out of range for n = {n}")));
    }
    let stratum = morse.complex().stratum(p)?;
    let target = stratum.vars().clone();
    let size = n - p - 1;

    let mut models: BTreeMap<Vec<u8>, LaurentComplex> = BTreeMap::new();
    let mut blocks = Vec::new();
    for s in subsets_with_two(n, size) {
        let model = build_chlog_s(n, &s)?;
        let rest: Vec<u8> = (2..=n as u8).filter(|x| !s.contains(x)).collect();
        for prefix in rest.iter().copied().permutations(p) {
            blocks.push(Block {
                subset: s.clone(),
                prefix,
                dims: model.dims(),
            });
        }
        models.insert(s, model);
    }

    let mut stratum_dims = stratum.dims();
    stratum_dims.resize(n - 1, 0);
    let mut model_dims = vec![0; n - 1];
    for b in &blocks {
        for (k, d) in b.dims.iter().enumerate() {
            model_dims[k + p] += d;
        }
    }
    let dims_match =
        model_dims == stratum_dims && blocks.len() == factorial(p) as usize * models.len();

    let mut mismatches = Vec::new();
    let indices: BTreeMap<&Vec<u8>, Vec<CellIndex>> = models
        .iter()
        .map(|(s, m)| {
            (
                s,
                (0..m.len())
                    .map(|k| CellIndex::new(m.basis(k).to_vec()))
                    .collect(),
            )
        })
        .collect();
    let sign = |k: usize| if k.is_multiple_of(2) { 1 } else { -1 };
    for k in (p + 1)..stratum.len() {
        let d = stratum.boundary(k);
        let mut expected: BTreeMap<(usize, usize), LaurentPoly> = BTreeMap::new();
        let locate = |deg: usize, i: usize| -> Option<(Vec<u8>, Vec<u8>, usize)> {
            let (prefix, s, residual) = split_cell(&stratum.basis(deg)[i])?;
            let id = indices.get(&s)?.get(deg - p)?.id(&residual)?;
            Some((prefix, s, id.0))
        };
        // model entries pulled back to stratum coordinates
        let row_of: BTreeMap<(Vec<u8>, Vec<u8>, usize), usize> = (0..stratum.basis(k - 1).len())
            .filter_map(|i| locate(k - 1, i).map(|key| (key, i)))
            .collect();
        for x in 0..stratum.basis(k).len() {
            let Some((prefix, s, jx)) = locate(k, x) else {
                mismatches.push(EntryMismatch {
                    degree: k,
                    row: String::new(),
                    col: stratum.basis(k)[x].to_string(),
                    expected: "a block cell".into(),
                    found: "no block".into(),
                });
                continue;
            };
            let md = models[&s].boundary(k - p);
            for (jy, _, v) in md.entries().iter().filter(|e| e.1 == jx) {
                let Some(&y) = row_of.get(&(prefix.clone(), s.clone(), *jy)) else {
                    continue;
                };
                let mut e = v.embed(&target)?;
                if sign(k) * sign(k - 1) < 0 {
                    e = -&e;
                }
                expected.insert((y, x), e);
            }
        }
        let found: BTreeMap<(usize, usize), &LaurentPoly> =
            d.entries().iter().map(|(i, j, v)| ((*i, *j), v)).collect();
        for key in expected
            .keys()
            .chain(found.keys())
            .copied()
            .collect::<std::collections::BTreeSet<_>>()
        {
            let e = expected.get(&key);
            let f = found.get(&key).copied();
            if e != f {
                mismatches.push(EntryMismatch {
                    degree: k,
                    row: stratum.basis(k - 1)[key.0].to_string(),
                    col: stratum.basis(k)[key.1].to_string(),
                    expected: e.map_or("0".into(), ToString::to_string),
                    found: f.map_or("0".into(), ToString::to_string),
                });
            }
        }
    }
    let pass = dims_match && mismatches.is_empty();
    Ok(StrataDecomposition {
        n,
        p,
        blocks,
        stratum_dims,
        dims_match,
        mismatches,
        pass,
    })
}

pub fn strata_decomposition(n: usize, p: usize) -> Result<StrataDecomposition> {
    strata_decomposition_of(&morse_complex(n)?, p)
}

/// `table[p][q]` is the generic dimension of `H_{p+q}` of stratum `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct E1Page {
    pub n: usize,
    pub table: Vec<Vec<usize>>,
    pub prime: u64,
    pub seeds: Vec<u64>,
    pub trials: usize,
    /// Every trial of every stratum gave the same ranks.
    pub agreement: bool,
}

impl E1Page {
    /// The only nonzero entry is `(n-2)!` at `(n-2, 0)`.
    pub fn collapses(&self) -> bool {
        let top = self.n - 2;
        self.table.iter().enumerate().all(|(p, row)| {
            row.iter().enumerate().all(|(q, &v)| {
                if (p, q) == (top, 0) {
                    v as u64 == factorial(top)
                } else {
                    v == 0
                }
            })
        })
    }

    /// `Σ_p E1[p][k - p]` for each total degree `k`.
    pub fn total_degree_sums(&self) -> Vec<usize> {
        let len = self.n - 1;
        (0..len)
            .map(|k| (0..=k).map(|p| self.table[p][k - p]).sum())
            .collect()
    }
}

/// The E¹ page of any complex filtered by height on `R̃(n)`.
pub fn e1_page_of(
    c: &LaurentComplex,
    n: usize,
    trials: usize,
    prime: u64,
    seed: u64,
) -> Result<E1Page> {
    let len = n - 1;
    let mut table = vec![vec![0; len]; len];
    let mut seeds = Vec::new();
    let mut agreement = true;
    for (p, row) in table.iter_mut().enumerate() {
        let s = c.stratum(p)?;
        let report = generic_betti(&s, trials, prime, seed, &[])?;
        agreement &= report.agreement;
        if let crate::complex::Method::GenericSpecialization { seeds: ss, .. } = &report.method {
            if seeds.is_empty() {
                seeds = ss.clone();
            }
        }
        for (k, &b) in report.betti.iter().enumerate().skip(p) {
            row[k - p] = b;
        }
    }
    Ok(E1Page {
        n,
        table,
        prime,
        seeds,
        trials,
        agreement,
    })
}

pub fn e1_page(n: usize, trials: usize, prime: u64, seed: u64) -> Result<E1Page> {
    let m = morse_complex(n)?;
    e1_page_of(m.complex(), n, trials, prime, seed)
}

/// Values used for the low-entropy probes.
pub const LOW_ENTROPY_SUPPORT: [u64; 3] = [1, 2, 3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointBetti {
    pub values: Vec<u64>,
    pub betti: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauRefinementReport {
    pub n: usize,
    pub expected: Vec<usize>,
    /// Uniform points subject only to `τ_n ≠ 0`.
    pub uniform: HomologyReport,
    /// Points with values in [`LOW_ENTROPY_SUPPORT`] subject to `τ_n ≠ 0`.
    pub low_entropy: Vec<PointBetti>,
    /// The point with every variable ↦ 1, where `τ_n` vanishes.
    pub degenerate: PointBetti,
    pub pass: bool,
}

fn top_betti(n: usize) -> Vec<usize> {
    let mut v = vec![0; n - 1];
    v[n - 2] = factorial(n - 2) as usize;
    v
}

/// Betti numbers of `t̃Ch^log(n)` at points where only `τ_n` is required
/// to be nonzero.
///
/// After inverting `τ_n` the homology is free and concentrated in the top
/// degree, so every point off the zero set of `τ_n`, however special, must
/// give the generic answer. The all-ones point lies on it and does not.
pub fn verify_tau_refinement(
    n: usize,
    trials: usize,
    prime: u64,
    seed: u64,
) -> Result<TauRefinementReport> {
    if n < 3 {
        return Err(Error::usage("τ refinement needs n ≥ 3"));
    }
    let c = build_tchlog(n)?;
    tau_refinement_of(&c, n, trials, prime, seed)
}

pub fn tau_refinement_of(
    c: &LaurentComplex,
    n: usize,
    trials: usize,
    prime: u64,
    seed: u64,
) -> Result<TauRefinementReport> {
    let vars: Arc<VarSet> = c.vars().clone();
    let tau = tau_n(n)?;
    let expected = top_betti(n);
    let uniform = generic_betti(c, trials, prime, seed, std::slice::from_ref(&tau))?;
    let mut low_entropy = Vec::with_capacity(trials);
    for t in 0..trials {
        let at = random_specialization_from(
            &vars,
            prime,
            derive_seed(seed, (1 << 32) + t as u64),
            std::slice::from_ref(&tau),
            &LOW_ENTROPY_SUPPORT,
        )?;
        low_entropy.push(PointBetti {
            betti: betti_at(c, &at).betti,
            values: at.values().to_vec(),
        });
    }
    let ones = Specialization::ones(&vars, prime)?;
    let degenerate = PointBetti {
        betti: betti_at(c, &ones).betti,
        values: ones.values().to_vec(),
    };
    let pass = uniform.betti == expected
        && uniform.agreement
        && low_entropy.iter().all(|x| x.betti == expected)
        && degenerate.betti != expected;
    Ok(TauRefinementReport {
        n,
        expected,
        uniform,
        low_entropy,
        degenerate,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modp::MERSENNE_61;

    #[test]
    fn subsets_in_order() {
        assert_eq!(subsets_with_two(4, 2), vec![vec![2, 3], vec![2, 4]]);
        assert_eq!(subsets_with_two(4, 1), vec![vec![2]]);
        assert!(subsets_with_two(4, 0).is_empty());
    }

    #[test]
    fn strata_small() {
        let d = strata_decomposition(3, 1).unwrap();
        assert!(d.pass, "{:?}", d.mismatches);
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].subset, vec![2]);
        assert_eq!(d.stratum_dims, vec![0, 1]);

        let d = strata_decomposition(4, 0).unwrap();
        assert!(d.pass, "{:?}", d.mismatches);
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].subset, vec![2, 3, 4]);

        for p in 0..=2 {
            let d = strata_decomposition(4, p).unwrap();
            assert!(d.pass, "p = {p}: {:?}", d.mismatches);
        }
        let top = strata_decomposition(4, 2).unwrap();
        assert_eq!(top.stratum_dims, vec![0, 0, 2]);
        assert!(strata_decomposition(4, 3).is_err());
    }

    #[test]
    fn e1_small() {
        let e = e1_page(2, 3, MERSENNE_61, 0).unwrap();
        assert_eq!(e.table, vec![vec![1]]);
        let e = e1_page(3, 3, MERSENNE_61, 0).unwrap();
        assert_eq!(e.table, vec![vec![0, 0], vec![1, 0]]);
        assert!(e.collapses());
        let e = e1_page(4, 3, MERSENNE_61, 7).unwrap();
        assert!(e.collapses(), "{:?}", e.table);
        let direct = e1_page_of(&build_tchlog(4).unwrap(), 4, 3, MERSENNE_61, 7).unwrap();
        assert_eq!(direct.table, e.table);
    }

    #[test]
    fn tau_refinement_small() {
        let r = verify_tau_refinement(3, 3, MERSENNE_61, 0).unwrap();
        assert!(r.pass);
        assert_eq!(r.uniform.betti, vec![0, 1]);
        assert_eq!(r.degenerate.betti, vec![1, 2]);
        let r = verify_tau_refinement(4, 3, MERSENNE_61, 0).unwrap();
        assert!(r.pass);
        assert_eq!(r.uniform.betti, vec![0, 0, 2]);
        assert!(verify_tau_refinement(2, 3, MERSENNE_61, 0).is_err());
    }
}
