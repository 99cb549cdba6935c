use crate::modp::{inv_mod, mul_mod, sub_mod};

use super::FpMatrix;

type SparseRow = Vec<(usize, u64)>;

/// Rank over `F_p` by sparse row echelon insertion.
///
/// Rows are inserted shortest first; each row is reduced against the pivot
/// stored for its leading column until it either vanishes or becomes a new
/// pivot.
pub fn rank_fp(m: &FpMatrix) -> usize {
    let p = m.prime();
    // orient so that pivots are indexed by the shorter side
    let (n_lead, rows) = if m.rows() >= m.cols() {
        (
            m.cols(),
            collect_rows(m.rows(), m.entries().iter().map(|&(i, j, v)| (i, j, v))),
        )
    } else {
        (
            m.rows(),
            collect_rows(m.cols(), m.entries().iter().map(|&(i, j, v)| (j, i, v))),
        )
    };
    let mut rows = rows;
    rows.sort_by_key(Vec::len);
    let mut pivots: Vec<Option<SparseRow>> = vec![None; n_lead];
    let mut rank = 0;
    for mut row in rows {
        while let Some(&(lead, val)) = row.first() {
            match &pivots[lead] {
                Some(piv) => row = axpy(&row, val, piv, p),
                None => {
                    let inv = inv_mod(val, p);
                    for e in row.iter_mut() {
                        e.1 = mul_mod(e.1, inv, p);
                    }
                    pivots[lead] = Some(row);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn collect_rows(n: usize, entries: impl Iterator<Item = (usize, usize, u64)>) -> Vec<SparseRow> {
    let mut rows: Vec<SparseRow> = vec![Vec::new(); n];
    for (i, j, v) in entries {
        rows[i].push((j, v));
    }
    for r in rows.iter_mut() {
        r.sort_unstable_by_key(|e| e.0);
    }
    rows.retain(|r| !r.is_empty());
    rows
}

/// `row - scale * pivot`, where `pivot` has leading coefficient 1 at the
/// leading column of `row`.
fn axpy(row: &[(usize, u64)], scale: u64, pivot: &[(usize, u64)], p: u64) -> SparseRow {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut a, mut b) = (0, 0);
    while a < row.len() || b < pivot.len() {
        let ca = row.get(a).map_or(usize::MAX, |e| e.0);
        let cb = pivot.get(b).map_or(usize::MAX, |e| e.0);
        if ca < cb {
            out.push(row[a]);
            a += 1;
        } else if cb < ca {
            out.push((cb, sub_mod(0, mul_mod(scale, pivot[b].1, p), p)));
            b += 1;
        } else {
            let v = sub_mod(row[a].1, mul_mod(scale, pivot[b].1, p), p);
            if v != 0 {
                out.push((ca, v));
            }
            a += 1;
            b += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense Gaussian elimination, as an independent reference.
    #[allow(clippy::needless_range_loop)]
    fn dense_rank(mut a: Vec<Vec<u64>>, p: u64) -> usize {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..cols {
            let Some(piv) = (r..rows).find(|&i| !a[i][c].is_multiple_of(p)) else {
                continue;
            };
            a.swap(r, piv);
            let inv = inv_mod(a[r][c], p);
            for i in 0..rows {
                if i != r && a[i][c] != 0 {
                    let f = mul_mod(a[i][c], inv, p);
                    for j in 0..cols {
                        a[i][j] = sub_mod(a[i][j], mul_mod(f, a[r][j], p), p);
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn small_examples() {
        let id: Vec<Vec<u64>> = (0..5)
            .map(|i| (0..5).map(|j| (i == j) as u64).collect())
            .collect();
        assert_eq!(rank_fp(&FpMatrix::from_dense(7, &id)), 5);
        assert_eq!(
            rank_fp(&FpMatrix::from_dense(7, &[vec![0, 0], vec![0, 0]])),
            0
        );
        assert_eq!(
            rank_fp(&FpMatrix::from_dense(7, &[vec![1, 2], vec![2, 4]])),
            1
        );
        assert_eq!(rank_fp(&FpMatrix::from_triplets(0, 3, 7, vec![])), 0);
    }

    #[test]
    fn agrees_with_dense_reference() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for p in [2u64, 3, 7, 1_000_000_007] {
            for _ in 0..200 {
                let rows = rng.gen_range(0..8);
                let cols = rng.gen_range(1..8);
                let a: Vec<Vec<u64>> = (0..rows)
                    .map(|_| {
                        (0..cols)
                            .map(|_| {
                                if rng.gen_bool(0.4) {
                                    rng.gen_range(0..p)
                                } else {
                                    0
                                }
                            })
                            .collect()
                    })
                    .collect();
                let m = FpMatrix::from_triplets(
                    rows,
                    cols,
                    p,
                    a.iter()
                        .enumerate()
                        .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v))),
                );
                assert_eq!(rank_fp(&m), dense_rank(a, p));
            }
        }
    }
}
