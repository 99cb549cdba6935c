//! Sparse Laurent polynomials over ℤ in variables `t_ij`, `i < j`.
//!
//! A [`VarSet`] fixes which pairs carry a variable. Three families occur:
//! all pairs of `{1..n}`, all pairs except `(1, 2)`, and all pairs of a
//! subset `S ⊆ {2..n}`. Polynomials keep their terms in a `BTreeMap` keyed by
//! exponent vector, so two polynomials are equal exactly when their term
//! maps are.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use ibig::IBig;
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modp::{self, is_prime, mul_mod};

pub type Exponents = Vec<i32>;

/// The variables of a Laurent ring, one per listed pair.
#[derive(Debug, Clone, Eq, Serialize)]
pub struct VarSet {
    n: usize,
    pairs: Vec<(u8, u8)>,
    excluded: Option<(u8, u8)>,
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        self.pairs == other.pairs
    }
}

impl VarSet {
    pub fn new(n: usize, mut pairs: Vec<(u8, u8)>, excluded: Option<(u8, u8)>) -> Result<Self> {
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::usage("duplicate variable pair"));
        }
        if let Some(&(i, j)) = pairs
            .iter()
            .find(|&&(i, j)| i >= j || j as usize > n || i == 0)
        {
            return Err(Error::usage(format!(
                "invalid variable pair ({i}, {j}) for n = {n}"
            )));
        }
        if let Some(ex) = excluded {
            if pairs.contains(&ex) {
                return Err(Error::usage("excluded pair listed as a variable"));
            }
        }
        Ok(Self { n, pairs, excluded })
    }

    /// `R(n)`: every pair of `{1..n}`.
    pub fn full(n: usize) -> Arc<Self> {
        let pairs = (1..=n as u8).tuple_combinations().collect();
        Arc::new(Self {
            n,
            pairs,
            excluded: None,
        })
    }

    /// `R̃(n)`: every pair except `(1, 2)`.
    pub fn tilde(n: usize) -> Arc<Self> {
        let pairs = (1..=n as u8)
            .tuple_combinations()
            .filter(|&p| p != (1, 2))
            .collect();
        Arc::new(Self {
            n,
            pairs,
            excluded: Some((1, 2)),
        })
    }

    /// `R(S)`: pairs inside `S`, where `2 ∈ S ⊆ {2..n}`.
    pub fn on_subset(n: usize, subset: &[u8]) -> Result<Arc<Self>> {
        let s = normalize_subset(n, subset)?;
        let pairs = s.iter().copied().tuple_combinations().collect();
        Ok(Arc::new(Self {
            n,
            pairs,
            excluded: None,
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(u8, u8)] {
        &self.pairs
    }

    pub fn excluded(&self) -> Option<(u8, u8)> {
        self.excluded
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn index_of(&self, pair: (u8, u8)) -> Option<usize> {
        self.pairs.binary_search(&pair).ok()
    }

    pub fn var_name(&self, idx: usize) -> String {
        let (i, j) = self.pairs[idx];
        format!("t_{i}_{j}")
    }

    /// Ring descriptor used in matrix files, e.g. `laurent:t_1_3,t_2_3`.
    pub fn describe(&self) -> String {
        format!(
            "laurent:{}",
            (0..self.len()).map(|i| self.var_name(i)).join(",")
        )
    }

    pub fn from_description(text: &str) -> Result<Arc<Self>> {
        let body = text
            .strip_prefix("laurent:")
            .ok_or_else(|| Error::parse(format!("not a Laurent ring descriptor: `{text}`")))?;
        let mut pairs = Vec::new();
        for name in body.split(',').filter(|s| !s.is_empty()) {
            pairs.push(parse_var_name(name)?);
        }
        let n = pairs.iter().map(|&(_, j)| j as usize).max().unwrap_or(2);
        Ok(Arc::new(Self::new(n, pairs, None)?))
    }
}

/// Validate `2 ∈ S ⊆ {2..n}` and return `S` sorted and deduplicated.
pub fn normalize_subset(n: usize, subset: &[u8]) -> Result<Vec<u8>> {
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if !s.contains(&2) {
        return Err(Error::usage(format!("subset {subset:?} must contain 2")));
    }
    if s.iter().any(|&x| x < 2 || x as usize > n) {
        return Err(Error::usage(format!(
            "subset {subset:?} must lie in {{2..{n}}}"
        )));
    }
    Ok(s)
}

fn parse_var_name(name: &str) -> Result<(u8, u8)> {
    let bad = || Error::parse(format!("bad variable name `{name}`"));
    let rest = name.strip_prefix("t_").ok_or_else(bad)?;
    let (i, j) = rest.split_once('_').ok_or_else(bad)?;
    Ok((i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?))
}

#[derive(Debug, Clone)]
pub struct LaurentPoly {
    vars: Arc<VarSet>,
    terms: BTreeMap<Exponents, IBig>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && *self.vars == *other.vars
    }
}

impl Eq for LaurentPoly {}

impl LaurentPoly {
    pub fn zero(vars: &Arc<VarSet>) -> Self {
        Self {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Arc<VarSet>) -> Self {
        Self::constant(vars, IBig::from(1))
    }

    pub fn constant(vars: &Arc<VarSet>, c: IBig) -> Self {
        Self::monomial(vars, c, vec![0; vars.len()])
    }

    pub fn monomial(vars: &Arc<VarSet>, c: IBig, exps: Exponents) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let mut terms = BTreeMap::new();
        if c != IBig::from(0) {
            terms.insert(exps, c);
        }
        Self {
            vars: vars.clone(),
            terms,
        }
    }

    /// The variable `t_ij`.
    pub fn var(vars: &Arc<VarSet>, pair: (u8, u8)) -> Result<Self> {
        let idx = vars.index_of(pair).ok_or_else(|| {
            Error::usage(format!(
                "t_{}_{} is not a variable of this ring",
                pair.0, pair.1
            ))
        })?;
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        Ok(Self::monomial(vars, IBig::from(1), e))
    }

    /// `sign · ∏ t_ij` over the given pairs.
    pub fn signed_product(vars: &Arc<VarSet>, sign: i8, pairs: &[(u8, u8)]) -> Result<Self> {
        let mut e = vec![0; vars.len()];
        for &p in pairs {
            let idx = vars.index_of(p).ok_or_else(|| {
                Error::usage(format!("t_{}_{} is not a variable of this ring", p.0, p.1))
            })?;
            e[idx] += 1;
        }
        Ok(Self::monomial(vars, IBig::from(sign), e))
    }

    pub fn from_terms(
        vars: &Arc<VarSet>,
        terms: impl IntoIterator<Item = (Exponents, IBig)>,
    ) -> Self {
        let mut out = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            out.add_term(e, c);
        }
        out
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &IBig)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `±` a single monomial: the units of the Laurent ring.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && {
            let c = self.terms.values().next().unwrap();
            *c == IBig::from(1) || *c == IBig::from(-1)
        }
    }

    pub fn unit_inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        let inv: Exponents = e.iter().map(|x| -x).collect();
        Some(Self::monomial(&self.vars, c.clone(), inv))
    }

    /// Single-term polynomials: exponents of a monomial (any coefficient).
    pub fn as_monomial(&self) -> Option<(&Exponents, &IBig)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, e: Exponents, c: IBig) {
        if c == IBig::from(0) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == IBig::from(0) {
                    o.remove();
                }
            }
        }
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.vars, &other.vars) || *self.vars == *other.vars {
            Ok(())
        } else {
            Err(Error::RingMismatch {
                left: self.vars.describe(),
                right: other.vars.describe(),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = Self::zero(&self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    /// In-place `self += a * b`.
    pub fn add_product(&mut self, a: &Self, b: &Self) {
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                self.add_term(e, ca * cb);
            }
        }
    }

    pub fn try_equals(&self, other: &Self) -> Result<bool> {
        self.check_ring(other)?;
        Ok(self.terms == other.terms)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Image under every variable ↦ 1: the sum of the coefficients.
    pub fn augmentation(&self) -> IBig {
        self.terms.values().fold(IBig::from(0), |acc, c| acc + c)
    }

    /// Degree span `max - min` summed over variables; bounds the degree of the
    /// polynomial after clearing denominators.
    pub fn degree_span(&self) -> u64 {
        (0..self.vars.len())
            .map(|v| {
                let (lo, hi) = self
                    .terms
                    .keys()
                    .map(|e| e[v])
                    .minmax()
                    .into_option()
                    .unwrap_or((0, 0));
                (hi - lo) as u64
            })
            .sum()
    }

    pub fn evaluate(&self, at: &Specialization) -> u64 {
        assert_eq!(
            *self.vars, *at.vars,
            "specialization ring does not match polynomial ring"
        );
        let p = at.prime;
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut term = modp::reduce_int(c, p);
            for (v, &x) in e.iter().enumerate() {
                if x > 0 {
                    term = mul_mod(term, modp::pow_mod(at.values[v], x as u64, p), p);
                } else if x < 0 {
                    term = mul_mod(term, modp::pow_mod(at.inverses[v], (-x) as u64, p), p);
                }
            }
            acc = modp::add_mod(acc, term, p);
        }
        acc
    }

    /// Reinterpret in a ring containing all variables of `self` (by pair name).
    pub fn embed(&self, target: &Arc<VarSet>) -> Result<Self> {
        let map: Vec<usize> = self
            .vars
            .pairs
            .iter()
            .map(|&p| {
                target.index_of(p).ok_or_else(|| {
                    Error::usage(format!("t_{}_{} missing from target ring", p.0, p.1))
                })
            })
            .collect::<Result<_>>()?;
        let terms = self.terms.iter().map(|(e, c)| {
            let mut t = vec![0; target.len()];
            for (v, &x) in e.iter().enumerate() {
                t[map[v]] = x;
            }
            (t, c.clone())
        });
        Ok(Self::from_terms(target, terms))
    }

    /// Exact quotient in the Laurent ring, or `None` when `divisor` does not
    /// divide `self`.
    ///
    /// Both sides are shifted by monomials into honest polynomials with no
    /// monomial factor, then divided in lex order.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        self.check_ring(divisor).ok()?;
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let nv = self.vars.len();
        let shift_of = |p: &Self| -> Exponents {
            (0..nv)
                .map(|v| p.terms.keys().map(|e| e[v]).min().unwrap())
                .collect()
        };
        let (sa, sb) = (shift_of(self), shift_of(divisor));
        let shifted = |p: &Self, s: &Exponents| -> BTreeMap<Exponents, IBig> {
            p.terms
                .iter()
                .map(|(e, c)| (e.iter().zip(s).map(|(x, y)| x - y).collect(), c.clone()))
                .collect()
        };
        let mut rem = shifted(self, &sa);
        let b = shifted(divisor, &sb);
        let (lead_e, lead_c) = b.iter().next_back().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut quot = Self::zero(&self.vars);
        while let Some((e, c)) = rem.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&lead_e).any(|(x, y)| x < y) {
                return None;
            }
            let (q, r) = (&c / &lead_c, &c % &lead_c);
            if r != IBig::from(0) {
                return None;
            }
            let qe: Exponents = e.iter().zip(&lead_e).map(|(x, y)| x - y).collect();
            for (be, bc) in &b {
                let te: Exponents = be.iter().zip(&qe).map(|(x, y)| x + y).collect();
                let delta = &q * bc;
                let slot = rem.entry(te).or_insert_with(|| IBig::from(0));
                *slot -= delta;
            }
            rem.retain(|_, v| *v != IBig::from(0));
            let out_e: Exponents = qe
                .iter()
                .zip(sa.iter().zip(&sb))
                .map(|(x, (a, b))| x + a - b)
                .collect();
            quot.add_term(out_e, q);
        }
        Some(quot)
    }

    /// Parse the canonical text form (`-t_1_3*t_2_3^2+1`, `0`, ...).
    pub fn parse(vars: &Arc<VarSet>, text: &str) -> Result<Self> {
        Parser {
            vars,
            src: text.as_bytes(),
            pos: 0,
        }
        .poly()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = *c < IBig::from(0);
            let abs = if negative { -c } else { c.clone() };
            if negative {
                f.write_str("-")?;
            } else if k > 0 {
                f.write_str("+")?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(v, &x)| {
                    if x == 1 {
                        self.vars.var_name(v)
                    } else {
                        format!("{}^{}", self.vars.var_name(v), x)
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else {
                if abs != IBig::from(1) {
                    write!(f, "{abs}*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    vars: &'a Arc<VarSet>,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::parse(format!(
            "{what} at byte {} of `{}`",
            self.pos,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn poly(mut self) -> Result<LaurentPoly> {
        let mut out = LaurentPoly::zero(self.vars);
        if self.src == b"0" {
            return Ok(out);
        }
        let mut first = true;
        while self.pos < self.src.len() {
            let negative = match self.peek() {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') if !first => {
                    self.pos += 1;
                    false
                }
                _ if first => false,
                _ => return Err(self.err("expected `+` or `-`")),
            };
            first = false;
            let (e, c) = self.term()?;
            out.add_term(e, if negative { -c } else { c });
        }
        if first {
            return Err(self.err("empty polynomial"));
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Exponents, IBig)> {
        let mut coef = IBig::from(1);
        let mut e = vec![0; self.vars.len()];
        loop {
            match self.peek() {
                Some(b'0'..=b'9') => {
                    let d = self.digits().to_string();
                    coef *= d.parse::<IBig>().map_err(|_| self.err("bad integer"))?;
                }
                Some(b't') => {
                    let start = self.pos;
                    self.pos += 1;
                    while matches!(self.peek(), Some(b'_' | b'0'..=b'9')) {
                        self.pos += 1;
                    }
                    let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let pair = parse_var_name(name)?;
                    let idx = self
                        .vars
                        .index_of(pair)
                        .ok_or_else(|| self.err("unknown variable"))?;
                    let mut x = 1i32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        let neg = self.peek() == Some(b'-');
                        if neg {
                            self.pos += 1;
                        }
                        let d = self.digits();
                        let v: i32 = d.parse().map_err(|_| self.err("bad exponent"))?;
                        x = if neg { -v } else { v };
                    }
                    e[idx] += x;
                }
                _ => return Err(self.err("expected a factor")),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((e, coef))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("ring mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("ring mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("ring mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

/// `(∏_{i<j ∈ S} t_ij) - 1` in `R̃(n)`.
pub fn tau_s(n: usize, subset: &[u8]) -> Result<LaurentPoly> {
    let s = normalize_subset(n, subset)?;
    let vars = VarSet::tilde(n);
    let pairs: Vec<(u8, u8)> = s.iter().copied().tuple_combinations().collect();
    let prod = LaurentPoly::signed_product(&vars, 1, &pairs)?;
    Ok(&prod - &LaurentPoly::one(&vars))
}

/// Subsets `S ⊆ {2..n}` with `2 ∈ S` and `|S| ≥ 2`, in lexicographic order.
pub fn tau_subsets(n: usize) -> Vec<Vec<u8>> {
    let rest: Vec<u8> = (3..=n as u8).collect();
    let mut out: Vec<Vec<u8>> = (1..=rest.len())
        .flat_map(|k| rest.iter().copied().combinations(k))
        .map(|t| std::iter::once(2).chain(t).collect())
        .collect();
    out.sort();
    out
}

/// Product of `τ_S` over every `S ∋ 2` with at least two elements.
pub fn tau_n(n: usize) -> Result<LaurentPoly> {
    if n < 3 {
        return Err(Error::usage(format!("tau_n needs n >= 3, got {n}")));
    }
    let vars = VarSet::tilde(n);
    let mut acc = LaurentPoly::one(&vars);
    for s in tau_subsets(n) {
        acc = &acc * &tau_s(n, &s)?;
    }
    Ok(acc)
}

/// A point of the torus over `F_p`: one nonzero residue per variable.
#[derive(Debug, Clone, Serialize)]
pub struct Specialization {
    #[serde(skip)]
    vars: Arc<VarSet>,
    prime: u64,
    values: Vec<u64>,
    #[serde(skip)]
    inverses: Vec<u64>,
    seed: Option<u64>,
    nonce: u32,
}

/// Resampling budget for [`random_specialization`].
pub const MAX_SPECIALIZATION_ATTEMPTS: u32 = 64;

impl Specialization {
    pub fn new(vars: &Arc<VarSet>, prime: u64, values: Vec<u64>) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::usage(format!("{prime} is not prime")));
        }
        if values.len() != vars.len() {
            return Err(Error::usage("one value per variable required"));
        }
        if values.iter().any(|&v| v == 0 || v >= prime) {
            return Err(Error::usage("specialization values must lie in 1..p"));
        }
        let inverses = values.iter().map(|&v| modp::inv_mod(v, prime)).collect();
        Ok(Self {
            vars: vars.clone(),
            prime,
            values,
            inverses,
            seed: None,
            nonce: 0,
        })
    }

    /// Every variable ↦ 1.
    pub fn ones(vars: &Arc<VarSet>, prime: u64) -> Result<Self> {
        Self::new(vars, prime, vec![1; vars.len()])
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn nonce(&self) -> u32 {
        self.nonce
    }
}

/// Fixed mixing of a base seed with an index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform point of `(F_p^×)^vars` with every `avoid` polynomial nonzero.
///
/// Deterministic in `seed`; rejected draws are retried with an incremented
/// nonce up to [`MAX_SPECIALIZATION_ATTEMPTS`] times.
pub fn random_specialization(
    vars: &Arc<VarSet>,
    prime: u64,
    seed: u64,
    avoid: &[LaurentPoly],
) -> Result<Specialization> {
    if prime < (1 << 31) {
        return Err(Error::usage(format!("prime {prime} is below 2^31")));
    }
    sample(vars, prime, seed, avoid, |rng| rng.gen_range(1..prime))
}

/// Like [`random_specialization`] but each value is drawn from `support`.
///
/// Used to probe low-entropy points that are far from generic.
pub fn random_specialization_from(
    vars: &Arc<VarSet>,
    prime: u64,
    seed: u64,
    avoid: &[LaurentPoly],
    support: &[u64],
) -> Result<Specialization> {
    if support.is_empty() || support.iter().any(|&v| v % prime == 0) {
        return Err(Error::usage("support must be nonempty and avoid 0 mod p"));
    }
    sample(vars, prime, seed, avoid, |rng| {
        support[rng.gen_range(0..support.len())] % prime
    })
}

fn sample(
    vars: &Arc<VarSet>,
    prime: u64,
    seed: u64,
    avoid: &[LaurentPoly],
    mut draw: impl FnMut(&mut ChaCha8Rng) -> u64,
) -> Result<Specialization> {
    if !is_prime(prime) {
        return Err(Error::usage(format!("{prime} is not prime")));
    }
    for poly in avoid {
        if **poly.vars() != **vars {
            return Err(Error::RingMismatch {
                left: vars.describe(),
                right: poly.vars().describe(),
            });
        }
    }
    for nonce in 0..MAX_SPECIALIZATION_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, nonce as u64));
        let values: Vec<u64> = (0..vars.len()).map(|_| draw(&mut rng)).collect();
        let mut spec = Specialization::new(vars, prime, values)?;
        spec.seed = Some(seed);
        spec.nonce = nonce;
        if avoid.iter().all(|f| f.evaluate(&spec) != 0) {
            return Ok(spec);
        }
    }
    Err(Error::SpecializationExhausted {
        attempts: MAX_SPECIALIZATION_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modp::MERSENNE_61;

    fn t(vars: &Arc<VarSet>, i: u8, j: u8) -> LaurentPoly {
        LaurentPoly::var(vars, (i, j)).unwrap()
    }

    #[test]
    fn unit_inverse_cancels() {
        let r = VarSet::tilde(3);
        let x = t(&r, 1, 3);
        let inv = x.unit_inverse().unwrap();
        assert_eq!(&x * &inv, LaurentPoly::one(&r));
    }

    #[test]
    fn add_and_mul() {
        let r = VarSet::tilde(3);
        let one = LaurentPoly::one(&r);
        let x = t(&r, 1, 3);
        assert!((&(&x - &one) + &(&one - &x)).is_zero());
        let prod = &(&x + &one) * &(&x - &one);
        assert_eq!(prod, &x.pow(2) - &one);
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = LaurentPoly::one(&VarSet::tilde(3));
        let b = LaurentPoly::one(&VarSet::full(3));
        assert!(matches!(a.try_add(&b), Err(Error::RingMismatch { .. })));
    }

    #[test]
    fn tau_examples() {
        let r3 = VarSet::tilde(3);
        assert_eq!(
            tau_s(3, &[2, 3]).unwrap(),
            &t(&r3, 2, 3) - &LaurentPoly::one(&r3)
        );
        let r4 = VarSet::tilde(4);
        let one = LaurentPoly::one(&r4);
        let big = &(&t(&r4, 2, 3) * &t(&r4, 2, 4)) * &t(&r4, 3, 4);
        assert_eq!(tau_s(4, &[2, 3, 4]).unwrap(), &big - &one);
        assert!(tau_s(3, &[2]).unwrap().is_zero());
        assert!(tau_s(3, &[3]).is_err());

        assert_eq!(tau_n(3).unwrap(), &t(&r3, 2, 3) - &LaurentPoly::one(&r3));
        let expected = &(&(&t(&r4, 2, 3) - &one) * &(&t(&r4, 2, 4) - &one)) * &(&big - &one);
        assert_eq!(tau_n(4).unwrap(), expected);
        assert!(tau_n(2).is_err());

        let ones = Specialization::ones(&r3, MERSENNE_61).unwrap();
        assert_eq!(tau_n(3).unwrap().evaluate(&ones), 0);
    }

    #[test]
    fn evaluation_examples() {
        let r = VarSet::tilde(3);
        let x = t(&r, 1, 3);
        let y = t(&r, 2, 3);
        let p = MERSENNE_61;
        let at = Specialization::new(&r, p, vec![2, 3]).unwrap();
        assert_eq!((&x * &y).evaluate(&at), 6);
        assert_eq!(
            LaurentPoly::constant(&r, IBig::from(-5)).evaluate(&at),
            p - 5
        );
        let ones = Specialization::ones(&r, p).unwrap();
        assert_eq!((&y - &LaurentPoly::one(&r)).evaluate(&ones), 0);
        // t^{-1} evaluates to the inverse residue
        let inv = x.unit_inverse().unwrap();
        assert_eq!(mul_mod(inv.evaluate(&at), 2, p), 1);
    }

    #[test]
    fn specialization_avoids_tau() {
        let r = VarSet::tilde(3);
        let tau = tau_n(3).unwrap();
        let s = random_specialization(&r, MERSENNE_61, 7, std::slice::from_ref(&tau)).unwrap();
        assert_ne!(tau.evaluate(&s), 0);
        assert!(s.values().iter().all(|&v| (1..MERSENNE_61).contains(&v)));
        let again = random_specialization(&r, MERSENNE_61, 7, &[tau]).unwrap();
        assert_eq!(s.values(), again.values());

        let free = random_specialization(&r, MERSENNE_61, 7, &[]).unwrap();
        assert!(free.values().iter().all(|&v| v != 0));

        let zero = LaurentPoly::zero(&r);
        assert!(matches!(
            random_specialization(&r, MERSENNE_61, 7, &[zero]),
            Err(Error::SpecializationExhausted { .. })
        ));
        assert!(random_specialization(&r, 7, 0, &[]).is_err());
    }

    #[test]
    fn small_support_respects_avoid() {
        let r = VarSet::tilde(4);
        let tau = tau_n(4).unwrap();
        let s = random_specialization_from(&r, MERSENNE_61, 3, std::slice::from_ref(&tau), &[1, 2])
            .unwrap();
        assert!(s.values().iter().all(|&v| v == 1 || v == 2));
        assert_ne!(tau.evaluate(&s), 0);
    }

    #[test]
    fn text_form() {
        let r = VarSet::tilde(3);
        let x = t(&r, 1, 3);
        let y = t(&r, 2, 3);
        let one = LaurentPoly::one(&r);
        let f = &(&one - &(&x * &y.pow(2))) + &LaurentPoly::zero(&r);
        assert_eq!(f.to_string(), "-t_1_3*t_2_3^2+1");
        assert_eq!(LaurentPoly::parse(&r, "-t_1_3*t_2_3^2+1").unwrap(), f);
        let g = &(&x.unit_inverse().unwrap() * &LaurentPoly::constant(&r, IBig::from(3))) - &y;
        assert_eq!(LaurentPoly::parse(&r, &g.to_string()).unwrap(), g);
        assert_eq!(LaurentPoly::zero(&r).to_string(), "0");
        assert!(LaurentPoly::parse(&r, "t_1_2").is_err());
    }

    #[test]
    fn augmentation_kills_tau() {
        for n in 3..=5 {
            for s in tau_subsets(n) {
                assert_eq!(tau_s(n, &s).unwrap().augmentation(), IBig::from(0));
            }
        }
    }

    #[test]
    fn exact_division() {
        let r = VarSet::tilde(4);
        let x = t(&r, 1, 3);
        let y = t(&r, 2, 4);
        let one = LaurentPoly::one(&r);
        let a = &(&x - &one) * &(&(&y * &y) + &LaurentPoly::constant(&r, IBig::from(3)));
        let b = &(&x - &one) * &y.unit_inverse().unwrap();
        let q = a.div_exact(&b).unwrap();
        assert_eq!(&q * &b, a);
        assert!(x.div_exact(&(&x + &one)).is_none());
        assert!(LaurentPoly::constant(&r, IBig::from(3))
            .div_exact(&LaurentPoly::constant(&r, IBig::from(2)))
            .is_none());
        assert!(one.div_exact(&LaurentPoly::zero(&r)).is_none());
    }

    #[test]
    fn ring_descriptor_round_trip() {
        let r = VarSet::tilde(4);
        assert_eq!(*VarSet::from_description(&r.describe()).unwrap(), *r);
    }
}
