use std::collections::{HashMap, HashSet};

use ibig::{ops::Abs, IBig};

use super::SparseMatrix;

/// Nonzero invariant factors `d_1 | d_2 | … | d_r` of an integer matrix.
///
/// Unit pivots are eliminated first on the sparse structure (a unimodular
/// step contributing a factor 1 each); what remains is reduced densely with
/// minimal-absolute-value pivoting.
pub fn smith_normal_form(m: &SparseMatrix<IBig>) -> Vec<IBig> {
    let mut work = SparseWork::new(m);
    let units = work.eliminate_units();
    let (dense, _, _) = work.residual();
    let mut factors = dense_snf(dense);
    normalize_chain(&mut factors);
    let mut out = vec![IBig::from(1); units];
    out.extend(factors);
    out
}

struct SparseWork {
    rows: Vec<HashMap<usize, IBig>>,
    cols: Vec<HashSet<usize>>,
}

fn is_unit(v: &IBig) -> bool {
    *v == IBig::from(1) || *v == IBig::from(-1)
}

impl SparseWork {
    fn new(m: &SparseMatrix<IBig>) -> Self {
        let mut rows = vec![HashMap::new(); m.rows()];
        let mut cols = vec![HashSet::new(); m.cols()];
        for (i, j, v) in m.entries() {
            rows[*i].insert(*j, v.clone());
            cols[*j].insert(*i);
        }
        Self { rows, cols }
    }

    /// Repeatedly pivot on ±1 entries, shortest columns and rows first.
    fn eliminate_units(&mut self) -> usize {
        let mut count = 0;
        loop {
            let mut order: Vec<usize> = (0..self.cols.len())
                .filter(|&c| !self.cols[c].is_empty())
                .collect();
            order.sort_by_key(|&c| (self.cols[c].len(), c));
            let mut progress = false;
            for c in order {
                if self.cols[c].is_empty() {
                    continue;
                }
                let pivot_row = self.cols[c]
                    .iter()
                    .copied()
                    .filter(|&r| is_unit(&self.rows[r][&c]))
                    .min_by_key(|&r| (self.rows[r].len(), r));
                if let Some(r) = pivot_row {
                    self.pivot(r, c);
                    count += 1;
                    progress = true;
                }
            }
            if !progress {
                return count;
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let u = self.rows[r][&c].clone();
        let pivot_row: Vec<(usize, IBig)> =
            self.rows[r].iter().map(|(j, v)| (*j, v.clone())).collect();
        let others: Vec<usize> = self.cols[c].iter().copied().filter(|&x| x != r).collect();
        for r2 in others {
            // u = ±1 so u⁻¹ = u
            let factor = &self.rows[r2][&c] * &u;
            for (j, v) in &pivot_row {
                let delta = &factor * v;
                let row = &mut self.rows[r2];
                let entry = row.entry(*j).or_insert_with(|| IBig::from(0));
                *entry -= delta;
                if *entry == IBig::from(0) {
                    row.remove(j);
                    self.cols[*j].remove(&r2);
                } else {
                    self.cols[*j].insert(r2);
                }
            }
        }
        // column c now holds only the pivot; the rest of row r is cleared by
        // column operations that touch no other row
        for (j, _) in pivot_row {
            self.cols[j].remove(&r);
        }
        self.rows[r].clear();
    }

    fn residual(&self) -> (Vec<Vec<IBig>>, Vec<usize>, Vec<usize>) {
        let live_rows: Vec<usize> = (0..self.rows.len())
            .filter(|&r| !self.rows[r].is_empty())
            .collect();
        let live_cols: Vec<usize> = (0..self.cols.len())
            .filter(|&c| !self.cols[c].is_empty())
            .collect();
        let col_pos: HashMap<usize, usize> =
            live_cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let dense = live_rows
            .iter()
            .map(|&r| {
                let mut row = vec![IBig::from(0); live_cols.len()];
                for (j, v) in &self.rows[r] {
                    row[col_pos[j]] = v.clone();
                }
                row
            })
            .collect();
        (dense, live_rows, live_cols)
    }
}

#[allow(clippy::needless_range_loop)]
fn dense_snf(mut a: Vec<Vec<IBig>>) -> Vec<IBig> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let zero = IBig::from(0);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        // minimal nonzero |entry| in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != zero
                    && best.is_none_or(|(bi, bj)| (&a[i][j]).abs() < (&a[bi][bj]).abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t] != zero {
                    let q = &a[i][t] / &a[t][t];
                    for j in t..cols {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                    if a[i][t] != zero {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if a[t][j] != zero {
                    let q = &a[t][j] / &a[t][t];
                    for i in t..rows {
                        let d = &q * &a[i][t];
                        a[i][j] -= d;
                    }
                    if a[t][j] != zero {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
            // a remainder is smaller than the pivot: move it into place
            let mut best = (t, t);
            for i in t + 1..rows {
                if a[i][t] != zero && (&a[i][t]).abs() < (&a[best.0][best.1]).abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..cols {
                if a[t][j] != zero && (&a[t][j]).abs() < (&a[best.0][best.1]).abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push((&a[t][t]).abs());
    }
    diag
}

/// Turn a diagonal into a divisibility chain by `(a, b) ↦ (gcd, lcm)`.
fn normalize_chain(d: &mut [IBig]) {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = &d[i] * &d[j] / &g;
                d[i] = g;
                d[j] = l;
            }
        }
    }
}
