use ibig::IBig;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::laurent::{derive_seed, random_specialization, LaurentPoly, Specialization};

use super::{rank_fp, smith_normal_form, IntegerComplex, LaurentComplex};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    Snf,
    Fp {
        prime: u64,
    },
    /// Evaluation at one fixed point of the torus.
    Specialization {
        prime: u64,
        values: Vec<u64>,
    },
    GenericSpecialization {
        prime: u64,
        seeds: Vec<u64>,
        trials: usize,
        /// `trial_ranks[t][k]` is the rank of `d_k` in trial `t`.
        trial_ranks: Vec<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomologyReport {
    pub dims: Vec<usize>,
    pub betti: Vec<usize>,
    /// Invariant factors other than 1 per degree (integral computations only).
    #[serde(serialize_with = "serialize_torsion")]
    pub torsion: Vec<Vec<IBig>>,
    /// `ranks[k]` is the rank of `d_k`.
    pub ranks: Vec<usize>,
    pub method: Method,
    /// All trials of a generic computation agreed; always true otherwise.
    pub agreement: bool,
}

fn serialize_torsion<S: Serializer>(t: &[Vec<IBig>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let text: Vec<Vec<String>> = t
        .iter()
        .map(|d| d.iter().map(IBig::to_string).collect())
        .collect();
    text.serialize(s)
}

impl HomologyReport {
    fn from_ranks(dims: Vec<usize>, ranks: Vec<usize>, method: Method) -> Self {
        let betti = betti_from_ranks(&dims, &ranks);
        let torsion = vec![Vec::new(); dims.len()];
        Self {
            dims,
            betti,
            torsion,
            ranks,
            method,
            agreement: true,
        }
    }

    pub fn has_torsion(&self) -> bool {
        self.torsion.iter().any(|t| !t.is_empty())
    }

    pub fn euler_consistent(&self) -> bool {
        let alt = |v: &[usize]| -> i64 {
            v.iter()
                .enumerate()
                .map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) })
                .sum()
        };
        alt(&self.dims) == alt(&self.betti)
    }
}

fn betti_from_ranks(dims: &[usize], ranks: &[usize]) -> Vec<usize> {
    (0..dims.len())
        .map(|k| {
            let out = ranks[k];
            let inc = ranks.get(k + 1).copied().unwrap_or(0);
            dims[k] - out - inc
        })
        .collect()
}

/// Betti numbers of a Laurent complex evaluated at one point.
pub fn betti_at(c: &LaurentComplex, at: &Specialization) -> HomologyReport {
    let ranks = c.specialize(at).iter().map(rank_fp).collect();
    HomologyReport::from_ranks(
        c.dims(),
        ranks,
        Method::Specialization {
            prime: at.prime(),
            values: at.values().to_vec(),
        },
    )
}

/// Betti numbers of an integer complex reduced modulo `p`.
pub fn betti_mod_p(c: &IntegerComplex, p: u64) -> HomologyReport {
    let ranks = c
        .boundaries()
        .iter()
        .map(|d| rank_fp(&d.reduce_mod(p)))
        .collect();
    HomologyReport::from_ranks(c.dims(), ranks, Method::Fp { prime: p })
}

/// Dimensions of homology over the fraction field, by random specialization.
///
/// Each trial evaluates the complex at an independent point (seed derived
/// from `(seed, trial)`) avoiding the zeros of every `avoid` polynomial.
/// The generic rank of each `d_k` is the maximum over trials; `agreement`
/// records whether every trial saw the same ranks.
pub fn generic_betti(
    c: &LaurentComplex,
    trials: usize,
    prime: u64,
    seed: u64,
    avoid: &[LaurentPoly],
) -> Result<HomologyReport> {
    if trials == 0 {
        return Err(Error::usage("at least one trial is required"));
    }
    let mut seeds = Vec::with_capacity(trials);
    let mut trial_ranks: Vec<Vec<usize>> = Vec::with_capacity(trials);
    for t in 0..trials {
        let s = derive_seed(seed, t as u64);
        let at = random_specialization(c.vars(), prime, s, avoid)?;
        trial_ranks.push(c.specialize(&at).iter().map(rank_fp).collect());
        seeds.push(s);
    }
    let ranks: Vec<usize> = (0..c.len())
        .map(|k| trial_ranks.iter().map(|r| r[k]).max().unwrap())
        .collect();
    let agreement = trial_ranks.iter().all(|r| *r == ranks);
    let mut report = HomologyReport::from_ranks(
        c.dims(),
        ranks,
        Method::GenericSpecialization {
            prime,
            seeds,
            trials,
            trial_ranks,
        },
    );
    report.agreement = agreement;
    Ok(report)
}

/// Integral homology via Smith normal form of every boundary matrix.
pub fn integral_homology(c: &IntegerComplex) -> HomologyReport {
    let factors: Vec<Vec<IBig>> = c.boundaries().iter().map(smith_normal_form).collect();
    let ranks: Vec<usize> = factors.iter().map(Vec::len).collect();
    let mut report = HomologyReport::from_ranks(c.dims(), ranks, Method::Snf);
    let one = IBig::from(1);
    report.torsion = (0..c.len())
        .map(|k| {
            factors
                .get(k + 1)
                .map(|f| f.iter().filter(|d| **d != one).cloned().collect())
                .unwrap_or_default()
        })
        .collect();
    report
}
