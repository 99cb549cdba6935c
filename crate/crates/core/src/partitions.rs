//! Ordered partitions of a finite set of labels.
//!
//! A cell of degree `k` on a ground set of size `m` is a sequence of `m - k`
//! disjoint nonempty pieces, each piece totally ordered. The order inside a
//! piece is the storage order of its `Vec`, so `a ≺ b` means `a` appears
//! before `b`.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};

/// Canonical index of a cell inside the sorted enumeration of its degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedPartition {
    pieces: Vec<Vec<u8>>,
}

impl OrderedPartition {
    /// Build a partition of `{1..n}`, validating disjointness and coverage.
    pub fn new(n: usize, pieces: Vec<Vec<u8>>) -> Result<Self> {
        let ground: Vec<u8> = (1..=n as u8).collect();
        Self::on_ground(&ground, pieces)
    }

    /// Build a partition of an arbitrary ground set of labels.
    pub fn on_ground(ground: &[u8], pieces: Vec<Vec<u8>>) -> Result<Self> {
        if pieces.iter().any(|p| p.is_empty()) {
            return Err(Error::usage("ordered partition has an empty piece"));
        }
        let mut seen: Vec<u8> = pieces.iter().flatten().copied().collect();
        seen.sort_unstable();
        let mut expected = ground.to_vec();
        expected.sort_unstable();
        expected.dedup();
        if seen != expected {
            return Err(Error::usage(format!(
                "pieces {:?} do not partition {:?}",
                pieces, expected
            )));
        }
        Ok(Self { pieces })
    }

    pub(crate) fn from_pieces_unchecked(pieces: Vec<Vec<u8>>) -> Self {
        Self { pieces }
    }

    pub fn pieces(&self) -> &[Vec<u8>] {
        &self.pieces
    }

    pub fn into_pieces(self) -> Vec<Vec<u8>> {
        self.pieces
    }

    /// Size of the ground set.
    pub fn ground_size(&self) -> usize {
        self.pieces.iter().map(Vec::len).sum()
    }

    /// Sorted ground set.
    pub fn ground(&self) -> Vec<u8> {
        let mut g: Vec<u8> = self.pieces.iter().flatten().copied().collect();
        g.sort_unstable();
        g
    }

    pub fn degree(&self) -> usize {
        self.ground_size() - self.pieces.len()
    }

    /// 1-based index of the piece containing `label`.
    pub fn piece_of(&self, label: u8) -> Option<usize> {
        self.pieces
            .iter()
            .position(|p| p.contains(&label))
            .map(|i| i + 1)
    }

    /// Parse the ` | `-separated text form, e.g. `3 1 | 2`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pieces = Vec::new();
        for chunk in text.split('|') {
            let piece = chunk
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u8>()
                        .map_err(|_| Error::usage(format!("bad label `{tok}` in `{text}`")))
                })
                .collect::<Result<Vec<u8>>>()?;
            pieces.push(piece);
        }
        let ground: Vec<u8> = pieces.iter().flatten().copied().collect();
        Self::on_ground(&ground, pieces)
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = self
            .pieces
            .iter()
            .map(|p| p.iter().map(u8::to_string).join(" "))
            .join(" | ");
        f.write_str(&text)
    }
}

/// Parity of `#{(a, b) : b ≺ a, b ∈ B, a ∉ B}` for an ordered piece `A`.
pub fn sgn(piece: &[u8], subset: &[u8]) -> Result<u8> {
    if let Some(x) = subset.iter().find(|x| !piece.contains(x)) {
        return Err(Error::usage(format!(
            "{x} is not an element of the piece {piece:?}"
        )));
    }
    Ok(sgn_unchecked(piece, |x| subset.contains(&x)))
}

fn sgn_unchecked(piece: &[u8], in_subset: impl Fn(u8) -> bool) -> u8 {
    let mut count = 0usize;
    let mut subset_seen = 0usize;
    for &x in piece {
        if in_subset(x) {
            subset_seen += 1;
        } else {
            count += subset_seen;
        }
    }
    (count % 2) as u8
}

/// 1-based index of the piece containing 1.
pub fn iota(cell: &OrderedPartition) -> usize {
    cell.piece_of(1).expect("cell does not contain the label 1")
}

/// Number of elements strictly preceding 1 inside its piece.
pub fn height(cell: &OrderedPartition) -> usize {
    let piece = &cell.pieces[iota(cell) - 1];
    piece.iter().position(|&x| x == 1).unwrap()
}

/// A codimension-one face obtained by splitting one piece in two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub cell: OrderedPartition,
    pub sign: i8,
    /// 1-based index of the piece that was split.
    pub piece: usize,
    pub left: Vec<u8>,
    pub right: Vec<u8>,
}

impl Facet {
    /// Pairs `i < j` with `i ≺ j`, `i` in the left piece and `j` in the right
    /// piece. These are the winding offsets that grow by one along the split.
    pub fn log_pairs(&self, original_piece: &[u8]) -> Vec<(u8, u8)> {
        let mut out = Vec::new();
        for (a, &i) in original_piece.iter().enumerate() {
            if !self.left.contains(&i) {
                continue;
            }
            for &j in &original_piece[a + 1..] {
                if i < j && self.right.contains(&j) {
                    out.push((i, j));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// All faces of `cell` obtained by splitting a piece into an order-respecting
/// left/right pair, with sign `(-1)^(l + sgn(π_l; left))`.
pub fn facets(cell: &OrderedPartition) -> Vec<Facet> {
    let mut out = Vec::new();
    for (idx, piece) in cell.pieces.iter().enumerate() {
        let m = piece.len();
        if m < 2 {
            continue;
        }
        let l = idx + 1;
        for mask in 1u32..(1u32 << m) - 1 {
            let in_left = |pos: usize| mask & (1 << pos) != 0;
            let left: Vec<u8> = (0..m).filter(|&p| in_left(p)).map(|p| piece[p]).collect();
            let right: Vec<u8> = (0..m).filter(|&p| !in_left(p)).map(|p| piece[p]).collect();
            let parity = sgn_unchecked(piece, |x| left.contains(&x)) as usize;
            let sign = if (l + parity).is_multiple_of(2) {
                1
            } else {
                -1
            };
            let mut pieces = Vec::with_capacity(cell.pieces.len() + 1);
            pieces.extend_from_slice(&cell.pieces[..idx]);
            pieces.push(left.clone());
            pieces.push(right.clone());
            pieces.extend_from_slice(&cell.pieces[idx + 1..]);
            out.push(Facet {
                cell: OrderedPartition { pieces },
                sign,
                piece: l,
                left,
                right,
            });
        }
    }
    out
}

/// All ordered partitions of `{1..n}` of degree `k`, in canonical order.
pub fn enumerate_cells(n: usize, k: usize) -> Result<Vec<OrderedPartition>> {
    if n < 2 {
        return Err(Error::usage(format!("n must be at least 2, got {n}")));
    }
    let ground: Vec<u8> = (1..=n as u8).collect();
    enumerate_cells_on(&ground, k)
}

/// All ordered partitions of `ground` of degree `k`, in canonical order.
pub fn enumerate_cells_on(ground: &[u8], k: usize) -> Result<Vec<OrderedPartition>> {
    enumerate_cells_where(ground, k, |_, _| true)
}

/// Enumerate cells while pruning partial piece sequences.
///
/// `accept(prefix, next)` is called before `next` is appended as the
/// following piece; returning `false` discards every completion of that
/// prefix. The result is sorted canonically.
pub fn enumerate_cells_where<F>(ground: &[u8], k: usize, accept: F) -> Result<Vec<OrderedPartition>>
where
    F: Fn(&[Vec<u8>], &[u8]) -> bool,
{
    let m = ground.len();
    if m == 0 || k >= m {
        return Err(Error::usage(format!(
            "degree {k} out of range 0..={} for a ground set of size {m}",
            m.saturating_sub(1)
        )));
    }
    let n_pieces = m - k;
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n_pieces);
    let remaining: Vec<u8> = ground.to_vec();
    grow(&remaining, n_pieces, &mut prefix, &accept, &mut out);
    out.sort_unstable();
    Ok(out)
}

fn grow<F>(
    remaining: &[u8],
    pieces_left: usize,
    prefix: &mut Vec<Vec<u8>>,
    accept: &F,
    out: &mut Vec<OrderedPartition>,
) where
    F: Fn(&[Vec<u8>], &[u8]) -> bool,
{
    if pieces_left == 0 {
        if remaining.is_empty() {
            out.push(OrderedPartition {
                pieces: prefix.clone(),
            });
        }
        return;
    }
    let r = remaining.len();
    // leave at least one element for each later piece
    let max_size = r - (pieces_left - 1);
    let min_size = if pieces_left == 1 { r } else { 1 };
    for size in min_size..=max_size {
        for subset in remaining.iter().copied().combinations(size) {
            let rest: Vec<u8> = remaining
                .iter()
                .copied()
                .filter(|x| !subset.contains(x))
                .collect();
            for piece in subset.iter().copied().permutations(size) {
                if !accept(prefix, &piece) {
                    continue;
                }
                prefix.push(piece);
                grow(&rest, pieces_left - 1, prefix, accept, out);
                prefix.pop();
            }
        }
    }
}

/// Lookup table from cells to their canonical ids within one degree.
#[derive(Debug, Clone, Default)]
pub struct CellIndex {
    cells: Vec<OrderedPartition>,
    ids: HashMap<OrderedPartition, usize>,
}

impl CellIndex {
    pub fn new(cells: Vec<OrderedPartition>) -> Self {
        let ids = cells
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        Self { cells, ids }
    }

    pub fn id(&self, cell: &OrderedPartition) -> Option<CellId> {
        self.ids.get(cell).copied().map(CellId)
    }

    pub fn cell(&self, id: CellId) -> &OrderedPartition {
        &self.cells[id.0]
    }

    pub fn cells(&self) -> &[OrderedPartition] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// `n! · C(n-1, k)`, the number of ordered partitions of degree `k`.
pub fn cell_count(n: usize, k: usize) -> u64 {
    if k >= n {
        return 0;
    }
    let fact: u64 = (1..=n as u64).product();
    fact * binomial(n as u64 - 1, k as u64)
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub(crate) fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(pieces: &[&[u8]]) -> OrderedPartition {
        let pieces: Vec<Vec<u8>> = pieces.iter().map(|p| p.to_vec()).collect();
        let ground: Vec<u8> = pieces.iter().flatten().copied().collect();
        OrderedPartition::on_ground(&ground, pieces).unwrap()
    }

    /// Couples counted literally from the definition.
    fn sgn_brute(a: &[u8], b: &[u8]) -> u8 {
        let mut c = 0;
        for (pa, &x) in a.iter().enumerate() {
            for (pb, &y) in a.iter().enumerate() {
                if pb < pa && b.contains(&y) && !b.contains(&x) {
                    c += 1;
                }
            }
        }
        (c % 2) as u8
    }

    #[test]
    fn degree_zero_n2() {
        let cells = enumerate_cells(2, 0).unwrap();
        assert_eq!(cells, vec![op(&[&[1], &[2]]), op(&[&[2], &[1]])]);
    }

    #[test]
    fn counts_match_formula() {
        assert_eq!(enumerate_cells(3, 1).unwrap().len(), 12);
        assert_eq!(enumerate_cells(6, 5).unwrap().len(), 720);
        for n in 2..=5 {
            for k in 0..n {
                assert_eq!(
                    enumerate_cells(n, k).unwrap().len() as u64,
                    cell_count(n, k)
                );
            }
        }
    }

    #[test]
    fn out_of_range_degree() {
        assert!(enumerate_cells(3, 3).is_err());
        assert!(enumerate_cells(1, 0).is_err());
    }

    #[test]
    fn sgn_examples() {
        assert_eq!(sgn(&[1, 2], &[1]).unwrap(), 1);
        assert_eq!(sgn(&[1, 2], &[2]).unwrap(), 0);
        assert_eq!(sgn(&[3, 1, 2], &[3, 1]).unwrap(), 0);
        assert!(sgn(&[1, 2], &[3]).is_err());
    }

    #[test]
    fn sgn_agrees_with_literal_count() {
        let piece = [4u8, 1, 3, 2, 5];
        for mask in 0u32..32 {
            let b: Vec<u8> = (0..5)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| piece[i])
                .collect();
            assert_eq!(sgn(&piece, &b).unwrap(), sgn_brute(&piece, &b), "B = {b:?}");
        }
    }

    #[test]
    fn iota_and_height() {
        assert_eq!(iota(&op(&[&[1], &[2]])), 1);
        assert_eq!(iota(&op(&[&[3], &[1], &[2]])), 2);
        assert_eq!(iota(&op(&[&[2], &[3, 1]])), 2);
        assert_eq!(height(&op(&[&[1], &[2], &[3]])), 0);
        assert_eq!(height(&op(&[&[3, 1], &[2]])), 1);
        assert_eq!(height(&op(&[&[3, 4, 1], &[2]])), 2);
    }

    #[test]
    fn facet_examples() {
        let f = facets(&op(&[&[1, 2]]));
        let got: Vec<_> = f.iter().map(|f| (f.cell.clone(), f.sign)).collect();
        assert_eq!(got, vec![(op(&[&[1], &[2]]), 1), (op(&[&[2], &[1]]), -1)]);

        let f = facets(&op(&[&[1], &[2, 3]]));
        let got: Vec<_> = f.iter().map(|f| (f.cell.clone(), f.sign)).collect();
        assert_eq!(
            got,
            vec![(op(&[&[1], &[2], &[3]]), -1), (op(&[&[1], &[3], &[2]]), 1)]
        );

        assert!(facets(&op(&[&[2], &[1], &[3]])).is_empty());
    }

    #[test]
    fn log_pairs_follow_order_and_size() {
        let cell = op(&[&[3, 1, 2]]);
        for f in facets(&cell) {
            let pairs = f.log_pairs(&[3, 1, 2]);
            for (i, j) in pairs {
                assert!(i < j);
                assert!(f.left.contains(&i) && f.right.contains(&j));
            }
        }
        let f = facets(&op(&[&[1, 2]]));
        assert_eq!(f[0].log_pairs(&[1, 2]), vec![(1, 2)]);
        assert!(f[1].log_pairs(&[1, 2]).is_empty());
    }

    #[test]
    fn text_round_trip() {
        let c = op(&[&[3, 1], &[2]]);
        assert_eq!(c.to_string(), "3 1 | 2");
        assert_eq!(OrderedPartition::parse("3 1 | 2").unwrap(), c);
        assert!(OrderedPartition::parse("1 1 | 2").is_err());
    }

    #[test]
    fn pruned_enumeration_is_a_filter() {
        let ground = [1u8, 2, 3, 4];
        for k in 0..3 {
            let all = enumerate_cells_on(&ground, k).unwrap();
            let kept = enumerate_cells_where(&ground, k, |prefix, next| {
                let one_placed = prefix.iter().any(|p| p.contains(&1));
                !(next.contains(&2) && !one_placed) && !(next.contains(&1) && next.contains(&2))
            })
            .unwrap();
            let filtered: Vec<_> = all
                .into_iter()
                .filter(|c| {
                    let (a, b) = (c.piece_of(1).unwrap(), c.piece_of(2).unwrap());
                    a < b
                })
                .collect();
            assert_eq!(kept, filtered);
        }
    }
}
