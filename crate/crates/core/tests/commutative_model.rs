use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stateop_core::commutative::{
    check_mv_conditional_expectation, is_ce_commutative, is_strong_commutative, mv_ce_from_strong_operator,
    mv_conditional_expectation, quotient_strong_operator, random_fuzzy, random_partition, random_prob_space,
    random_stochastic_idempotent, BlockPartition, FiniteProbSpace, FuzzyEventVector, StochasticIdempotent,
};
use stateop_core::rational::{q, Q};

fn rows(entries: &[&[(i64, i64)]]) -> Vec<Vec<Q>> {
    entries.iter().map(|r| r.iter().map(|&(n, d)| q(n, d)).collect()).collect()
}

fn counterexample() -> StochasticIdempotent {
    StochasticIdempotent::new(rows(&[&[(1, 1), (0, 1), (0, 1)], &[(0, 1), (1, 1), (0, 1)], &[(1, 2), (1, 2), (0, 1)]]))
        .unwrap()
}

fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
        .collect()
}

fn apply(t: &[Vec<Q>], f: &[Q]) -> Vec<Q> {
    t.iter().map(|row| row.iter().zip(f).map(|(a, b)| a * b).sum()).collect()
}

/// Strong means the range is closed under pointwise minimum; checked on all
/// pairs of 0/½/1-valued vectors.
fn min_closed_on_grid(t: &[Vec<Q>]) -> bool {
    let n = t.len();
    let grid: Vec<Vec<Q>> = (0..3usize.pow(n as u32))
        .map(|code| (0..n).map(|i| q((code / 3usize.pow(i as u32) % 3) as i64, 2)).collect())
        .collect();
    let range: Vec<Vec<Q>> = grid.iter().map(|f| apply(t, f)).collect();
    range.iter().all(|f| {
        range.iter().all(|g| {
            let m: Vec<Q> = f.iter().zip(g).map(|(a, b)| a.min(b).clone()).collect();
            apply(t, &m) == m
        })
    })
}

#[test]
fn counterexample_is_neither_strong_nor_ce() {
    let t = counterexample();
    let expected = Some((vec![q(1, 1), q(0, 1), q(1, 2)], vec![q(0, 1), q(1, 1), q(1, 2)]));
    let strong = is_strong_commutative(&t, 0).unwrap();
    let ce = is_ce_commutative(&t, 0).unwrap();
    assert!(!strong.holds && !ce.holds);
    assert_eq!(strong.witness, expected);
    assert_eq!(ce.witness, expected);
    assert!(!min_closed_on_grid(t.rows()));
    let f = &expected.as_ref().unwrap().0;
    let g = &expected.as_ref().unwrap().1;
    assert_eq!(&apply(t.rows(), f), f);
    let m: Vec<Q> = f.iter().zip(g).map(|(a, b)| a.min(b).clone()).collect();
    assert_eq!(apply(t.rows(), &m), vec![q(0, 1), q(0, 1), q(0, 1)]);
}

#[test]
fn block_averaging_is_strong() {
    let t = StochasticIdempotent::new(rows(&[
        &[(1, 2), (1, 2), (0, 1), (0, 1)],
        &[(1, 2), (1, 2), (0, 1), (0, 1)],
        &[(0, 1), (0, 1), (1, 3), (2, 3)],
        &[(0, 1), (0, 1), (1, 3), (2, 3)],
    ]))
    .unwrap();
    assert!(is_strong_commutative(&t, 0).unwrap().holds);
    assert!(is_ce_commutative(&t, 0).unwrap().holds);
    assert!(min_closed_on_grid(t.rows()));
}

#[test]
fn invalid_matrices_are_rejected() {
    assert!(StochasticIdempotent::new(rows(&[&[(1, 2), (1, 2)], &[(1, 1), (0, 1)]])).is_err());
    assert!(StochasticIdempotent::new(rows(&[&[(3, 2), (-1, 2)], &[(0, 1), (1, 1)]])).is_err());
    assert!(StochasticIdempotent::new(rows(&[&[(1, 2), (1, 4)], &[(0, 1), (1, 1)]])).is_err());
}

#[test]
fn conditional_expectation_example() {
    let space = FiniteProbSpace::new(vec![q(1, 6), q(1, 3), q(0, 1), q(1, 2), q(0, 1)]).unwrap();
    let partition = BlockPartition::new(5, vec![vec![0, 2], vec![1, 3], vec![4]]).unwrap();
    let a = FuzzyEventVector::new(vec![q(1, 3), q(1, 1), q(1, 2), q(0, 1), q(1, 1)]).unwrap();
    let e = mv_conditional_expectation(&space, &partition, &a).unwrap();
    assert_eq!(e.values(), &[q(1, 3), q(2, 5), q(1, 3), q(2, 5), q(0, 1)]);
    let b = a.neg();
    assert!(check_mv_conditional_expectation(&space, &partition, &a, &b).unwrap().holds());
}

#[test]
fn null_points_are_ignored_by_quotient() {
    let space = FiniteProbSpace::new(vec![q(1, 2), q(1, 2), q(0, 1), q(0, 1)]).unwrap();
    let partition = BlockPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
    let out = quotient_strong_operator(&space, &partition).unwrap();
    assert_eq!(out.points, vec![0, 1]);
    assert!(out.strong && out.range_is_block_constants && out.null_points_ignored);
}

fn oracle_expectation(space: &FiniteProbSpace, partition: &BlockPartition, a: &[Q]) -> Vec<Q> {
    let w = space.weights();
    let mut out = vec![q(0, 1); a.len()];
    for block in partition.blocks() {
        let mass: Q = block.iter().map(|&x| w[x].clone()).sum();
        if mass == q(0, 1) {
            continue;
        }
        let avg: Q = block.iter().map(|&x| &w[x] * &a[x]).sum::<Q>() / mass;
        for &x in block {
            out[x] = avg.clone();
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_idempotents_are_valid(seed in any::<u64>(), n in 1usize..=6, crisp in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_stochastic_idempotent(n, crisp, &mut rng);
        let r = t.rows();
        prop_assert_eq!(&mat_mul(r, r), r);
        for row in r {
            prop_assert!(row.iter().all(|x| *x >= q(0, 1)));
            prop_assert_eq!(row.iter().cloned().sum::<Q>(), q(1, 1));
        }
    }

    #[test]
    fn strong_and_ce_agree_with_min_closure(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_stochastic_idempotent(n, 0.5, &mut rng);
        let strong = is_strong_commutative(&t, seed).unwrap();
        let ce = is_ce_commutative(&t, seed).unwrap();
        prop_assert_eq!(strong.holds, ce.holds);
        prop_assert_eq!(strong.holds, min_closed_on_grid(t.rows()));
        if let Some((f, g)) = strong.witness {
            prop_assert_eq!(&apply(t.rows(), &f), &f);
            prop_assert_eq!(&apply(t.rows(), &g), &g);
            let m: Vec<Q> = f.iter().zip(&g).map(|(a, b)| a.min(b).clone()).collect();
            prop_assert_ne!(apply(t.rows(), &m), m);
        }
    }

    #[test]
    fn expectation_matches_block_average(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = random_prob_space(n, 0.3, &mut rng);
        let partition = random_partition(n, &mut rng);
        let a = random_fuzzy(n, 6, &mut rng);
        let b = random_fuzzy(n, 6, &mut rng);
        let e = mv_conditional_expectation(&space, &partition, &a).unwrap();
        let expected = oracle_expectation(&space, &partition, a.values());
        prop_assert_eq!(e.values(), expected.as_slice());
        let total: Q = (0..n).map(|x| &space.weights()[x] * &a.values()[x]).sum();
        let averaged: Q = (0..n).map(|x| &space.weights()[x] * &e.values()[x]).sum();
        prop_assert_eq!(total, averaged);
        prop_assert!(check_mv_conditional_expectation(&space, &partition, &a, &b).unwrap().holds());
    }

    #[test]
    fn quotient_operator_is_a_conditional_expectation(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = random_prob_space(n, 0.3, &mut rng);
        let partition = random_partition(n, &mut rng);
        let out = quotient_strong_operator(&space, &partition).unwrap();
        prop_assert!(out.strong && out.range_is_block_constants && out.null_points_ignored);
        let weights: Vec<Q> = out.points.iter().map(|&x| space.weights()[x].clone()).collect();
        let s = FiniteProbSpace::new(weights).unwrap();
        let m = out.points.len();
        let family: Vec<FuzzyEventVector> = (0..m).map(|x| FuzzyEventVector::indicator(m, &[x])).collect();
        prop_assert!(mv_ce_from_strong_operator(&out.t, &s, &family).unwrap().identity_holds);
    }
}
