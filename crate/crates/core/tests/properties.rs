use std::collections::BTreeMap;

use braidlog::braid::{build_tchlog, is_admissible};
use braidlog::complex::{rank_fp, smith_normal_form, FpMatrix, SparseMatrix};
use braidlog::laurent::{LaurentPoly, Specialization, VarSet};
use braidlog::morse::{classify, CellClass};
use braidlog::partitions::{facets, height, sgn, OrderedPartition};
use ibig::IBig;
use proptest::prelude::*;

fn partition_strategy(max_n: usize) -> impl Strategy<Value = OrderedPartition> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let labels: Vec<u8> = (1..=n as u8).collect();
            (
                Just(labels).prop_shuffle(),
                proptest::collection::vec(any::<bool>(), n - 1),
            )
        })
        .prop_map(|(labels, cuts)| {
            let mut pieces = vec![vec![labels[0]]];
            for (x, cut) in labels[1..].iter().zip(cuts) {
                if cut {
                    pieces.push(vec![*x]);
                } else {
                    pieces.last_mut().unwrap().push(*x);
                }
            }
            OrderedPartition::new(labels.len(), pieces).unwrap()
        })
}

fn poly_strategy(vars: std::sync::Arc<VarSet>) -> impl Strategy<Value = LaurentPoly> {
    let len = vars.len();
    proptest::collection::vec((proptest::collection::vec(-2i32..=2, len), -5i64..=5), 0..5)
        .prop_map(move |terms| {
            LaurentPoly::from_terms(&vars, terms.into_iter().map(|(e, c)| (e, IBig::from(c))))
        })
}

fn dense_strategy(max: usize, range: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-range..=range, c), r)
    })
}

/// Signed facet sum of the signed facet sum, as a formal combination.
fn boundary_twice(cell: &OrderedPartition) -> BTreeMap<OrderedPartition, i64> {
    let mut acc = BTreeMap::new();
    for f in facets(cell) {
        for g in facets(&f.cell) {
            *acc.entry(g.cell).or_insert(0) += f.sign as i64 * g.sign as i64;
        }
    }
    acc.retain(|_, v| *v != 0);
    acc
}

proptest! {
    #[test]
    fn text_round_trip(c in partition_strategy(7)) {
        prop_assert_eq!(OrderedPartition::parse(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn facets_drop_one_degree_and_height(c in partition_strategy(6)) {
        let expected: usize = c.pieces().iter().map(|p| (1usize << p.len()) - 2).sum();
        let fs = facets(&c);
        prop_assert_eq!(fs.len(), expected);
        for f in &fs {
            prop_assert_eq!(f.cell.degree() + 1, c.degree());
            prop_assert!(height(&f.cell) <= height(&c));
        }
    }

    #[test]
    fn boundary_squares_to_zero(c in partition_strategy(6)) {
        prop_assert!(boundary_twice(&c).is_empty());
    }

    #[test]
    fn sgn_complement_parity(c in partition_strategy(6), mask in any::<u16>()) {
        // #{b ≺ a, b ∈ B, a ∉ B} + #{a ≺ b, b ∈ B, a ∉ B} = |B|·|A∖B|
        let piece = &c.pieces()[0];
        let subset: Vec<u8> = piece.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect();
        let rest: Vec<u8> = piece.iter().copied().filter(|x| !subset.contains(x)).collect();
        let forward = sgn(piece, &subset).unwrap() as usize;
        let backward = sgn(piece, &rest).unwrap() as usize;
        prop_assert_eq!((forward + backward) % 2, subset.len() * rest.len() % 2);
    }

    #[test]
    fn matching_is_an_involution(c in partition_strategy(6)) {
        prop_assume!(is_admissible(&c));
        match classify(&c) {
            CellClass::Critical => {
                prop_assert_eq!(c.piece_of(1), Some(1));
                prop_assert_eq!(*c.pieces()[0].last().unwrap(), 1);
            }
            CellClass::Collapsible(p) => {
                prop_assert!(is_admissible(&p));
                prop_assert_eq!(p.degree() + 1, c.degree());
                prop_assert_eq!(height(&p), height(&c));
                prop_assert_eq!(classify(&p), CellClass::Redundant(c.clone()));
            }
            CellClass::Redundant(p) => {
                prop_assert!(is_admissible(&p));
                prop_assert_eq!(p.degree(), c.degree() + 1);
                prop_assert_eq!(classify(&p), CellClass::Collapsible(c.clone()));
            }
        }
    }

    #[test]
    fn laurent_ring_laws(
        (a, b, c) in {
            let v = VarSet::tilde(3);
            (poly_strategy(v.clone()), poly_strategy(v.clone()), poly_strategy(v))
        }
    ) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &a), &LaurentPoly::zero(a.vars()));
        prop_assert_eq!(LaurentPoly::parse(a.vars(), &a.to_string()).unwrap(), a.clone());
        if !b.is_zero() {
            prop_assert_eq!((&a * &b).div_exact(&b), Some(a.clone()));
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism(
        (a, b) in {
            let v = VarSet::tilde(4);
            (poly_strategy(v.clone()), poly_strategy(v))
        },
        values in proptest::collection::vec(1u64..1_000_002, 5)
    ) {
        let p = 1_000_003;
        let at = Specialization::new(a.vars(), p, values).unwrap();
        let prod = (a.evaluate(&at) as u128 * b.evaluate(&at) as u128 % p as u128) as u64;
        prop_assert_eq!((&a * &b).evaluate(&at), prod);
        prop_assert_eq!((&a + &b).evaluate(&at), (a.evaluate(&at) + b.evaluate(&at)) % p);
    }

    #[test]
    fn rank_is_transpose_invariant(m in dense_strategy(7, 3)) {
        let p = 1_000_003;
        let red = |x: i64| x.rem_euclid(p as i64) as u64;
        let rows: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|&x| red(x)).collect()).collect();
        let cols: Vec<Vec<u64>> = (0..m[0].len()).map(|j| m.iter().map(|r| red(r[j])).collect()).collect();
        let a = FpMatrix::from_dense(p, &rows);
        let t = FpMatrix::from_dense(p, &cols);
        prop_assert_eq!(rank_fp(&a), rank_fp(&t));
        prop_assert!(rank_fp(&a) <= m.len().min(m[0].len()));
    }

    #[test]
    fn smith_form_is_a_divisibility_chain(m in dense_strategy(5, 6)) {
        let trip: Vec<_> = m
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &x)| (i, j, IBig::from(x))))
            .collect();
        let s = SparseMatrix::from_triplets(m.len(), m[0].len(), trip);
        let d = smith_normal_form(&s);
        for w in d.windows(2) {
            prop_assert_eq!(&w[1] % &w[0], IBig::from(0));
        }
        prop_assert!(d.iter().all(|x| *x > IBig::from(0)));
        // the rank over Q equals the rank mod a prime not dividing any factor
        let p = 1_000_003u64;
        prop_assert_eq!(d.len(), rank_fp(&s.reduce_mod(p)));
    }
}

#[test]
fn tchlog_filtration_and_profile() {
    for n in 2..=5 {
        let c = build_tchlog(n).unwrap();
        assert!(c.filtration_respected());
        let profile = c.height_profile().unwrap();
        assert_eq!(profile.len(), c.len());
    }
}
