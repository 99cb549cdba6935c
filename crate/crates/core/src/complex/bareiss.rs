use crate::laurent::LaurentPoly;

use super::SparseMatrix;

/// Rank over the fraction field of the Laurent ring, computed exactly by
/// fraction-free (Bareiss) elimination.
///
/// Entries grow quickly; this is an oracle for small matrices only.
pub fn exact_rank(m: &SparseMatrix<LaurentPoly>) -> usize {
    let Some((_, _, sample)) = m.entries().first() else {
        return 0;
    };
    let zero = LaurentPoly::zero(sample.vars());
    let mut a = vec![vec![zero.clone(); m.cols()]; m.rows()];
    for (i, j, v) in m.entries() {
        a[*i][*j] = v.clone();
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut prev = LaurentPoly::one(sample.vars());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &(&a[r][c] * &a[i][j]) - &(&a[i][c] * &a[r][j]);
                a[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step must divide exactly in a domain");
            }
            a[i][c] = zero.clone();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::VarSet;
    use ibig::IBig;

    #[test]
    fn generic_vs_degenerate_rank() {
        let v = VarSet::tilde(3);
        let x = LaurentPoly::var(&v, (1, 3)).unwrap();
        let one = LaurentPoly::one(&v);
        // [[x, 1], [1, x^{-1}]] has determinant 0
        let singular = SparseMatrix::from_triplets(
            2,
            2,
            vec![
                (0, 0, x.clone()),
                (0, 1, one.clone()),
                (1, 0, one.clone()),
                (1, 1, x.unit_inverse().unwrap()),
            ],
        );
        assert_eq!(exact_rank(&singular), 1);
        // [[x, 1], [1, 1]] has determinant x - 1 ≠ 0
        let regular = SparseMatrix::from_triplets(
            2,
            2,
            vec![
                (0, 0, x),
                (0, 1, one.clone()),
                (1, 0, one.clone()),
                (1, 1, one),
            ],
        );
        assert_eq!(exact_rank(&regular), 2);
    }

    #[test]
    fn three_by_three_with_skipped_column() {
        let v = VarSet::tilde(4);
        let x = LaurentPoly::var(&v, (1, 3)).unwrap();
        let y = LaurentPoly::var(&v, (2, 4)).unwrap();
        let two = LaurentPoly::constant(&v, IBig::from(2));
        let m = SparseMatrix::from_triplets(
            3,
            4,
            vec![
                (0, 1, x.clone()),
                (0, 2, y.clone()),
                (1, 1, &x * &y),
                (1, 2, &y * &y),
                (2, 3, two),
                (2, 2, x.clone()),
            ],
        );
        // second row is y times the first
        assert_eq!(exact_rank(&m), 2);
    }

    #[test]
    fn agrees_with_specialized_ranks() {
        use crate::braid::{build_chlog, build_tchlog};
        use crate::complex::generic_betti;
        use crate::modp::MERSENNE_61;
        use crate::morse::morse_complex;

        let complexes = [
            build_tchlog(3).unwrap(),
            build_chlog(3).unwrap(),
            morse_complex(4).unwrap().complex,
        ];
        for c in &complexes {
            let exact: Vec<usize> = c.boundaries().iter().map(exact_rank).collect();
            let g = generic_betti(c, 3, MERSENNE_61, 0, &[]).unwrap();
            assert_eq!(exact, g.ranks);
        }
    }
}
