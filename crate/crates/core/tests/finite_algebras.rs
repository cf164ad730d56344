use std::collections::BTreeSet;

use proptest::prelude::*;
use stateop_core::effect::{
    classify, state_space, validate_effect_algebra, EffectAlgebra, Elem, FiniteEffectAlgebra,
};
use stateop_core::fixtures;
use stateop_core::mv::{effect_algebra_to_mv, mv_to_effect_algebra, validate_mv, MvAlgebra};
use stateop_core::rational::q;
use stateop_core::state_ops::{
    enumerate_state_operators, induced_state, quotient_state_operator, validate_state_operator, ElementMap,
};

fn oracle_leq(t: &FiniteEffectAlgebra, a: Elem, b: Elem) -> bool {
    (0..t.len()).any(|c| t.sum(a, c) == Some(b))
}

fn oracle_meet(t: &FiniteEffectAlgebra, a: Elem, b: Elem) -> Option<Elem> {
    let n = t.len();
    let lower: Vec<Elem> = (0..n).filter(|&c| oracle_leq(t, c, a) && oracle_leq(t, c, b)).collect();
    lower.iter().copied().find(|&m| lower.iter().all(|&c| oracle_leq(t, c, m)))
}

fn oracle_perp(t: &FiniteEffectAlgebra, a: Elem) -> Elem {
    (0..t.len()).find(|&b| t.sum(a, b) == Some(t.one())).unwrap()
}

fn oracle_is_state_operator(t: &FiniteEffectAlgebra, tau: &[Elem]) -> bool {
    let n = t.len();
    tau[t.one()] == t.one()
        && (0..n).all(|a| tau[tau[a]] == tau[a])
        && (0..n).all(|a| {
            (0..n).all(|b| match t.sum(a, b) {
                Some(c) => t.sum(tau[a], tau[b]) == Some(tau[c]),
                None => true,
            })
        })
}

fn brute_force(t: &FiniteEffectAlgebra) -> BTreeSet<Vec<Elem>> {
    let n = t.len();
    let mut out = BTreeSet::new();
    for code in 0..n.pow(n as u32) {
        let tau: Vec<Elem> = (0..n).map(|i| code / n.pow(i as u32) % n).collect();
        if oracle_is_state_operator(t, &tau) {
            out.insert(tau);
        }
    }
    out
}

fn mv_identities_hold(m: &MvAlgebra) -> bool {
    let n = m.len();
    let one = m.neg(m.zero());
    (0..n).all(|x| {
        m.plus(x, m.zero()) == x
            && m.neg(m.neg(x)) == x
            && m.plus(x, one) == one
            && (0..n).all(|y| {
                m.plus(x, y) == m.plus(y, x)
                    && m.plus(m.neg(m.plus(m.neg(x), y)), y) == m.plus(m.neg(m.plus(m.neg(y), x)), x)
                    && (0..n).all(|z| m.plus(m.plus(x, y), z) == m.plus(x, m.plus(y, z)))
            })
    })
}

#[test]
fn fixtures_validate() {
    for table in [fixtures::chain_table(1), fixtures::chain_table(2), fixtures::diamond_table(), fixtures::mo2_table()] {
        assert!(validate_effect_algebra(&table).is_valid());
    }
    for m in [fixtures::luk3(), fixtures::luk3_squared()] {
        assert!(validate_mv(&m).is_valid());
        assert!(mv_identities_hold(&m));
    }
}

#[test]
fn classification_matches_order_oracle() {
    let expected = [
        ("chain2", true, true, true),
        ("chain3", true, false, true),
        ("diamond", true, true, true),
        ("mo2", true, true, false),
        ("luk3", true, false, true),
        ("luk3xluk3", true, false, true),
    ];
    for (f, (name, lattice, oml, mv)) in fixtures::all().iter().zip(expected) {
        assert_eq!(f.name, name);
        let c = classify(&f.algebra);
        assert_eq!((c.is_lattice, c.is_oml, c.is_mv_effect_algebra), (lattice, oml, mv), "{name}");
        let t = f.algebra.table();
        let n = t.len();
        let oracle_lattice = (0..n).all(|a| (0..n).all(|b| oracle_meet(t, a, b).is_some()));
        assert_eq!(c.is_lattice, oracle_lattice, "{name}");
        let oracle_mv = oracle_lattice
            && (0..n).all(|a| {
                (0..n).all(|b| oracle_meet(t, a, b) != Some(t.zero()) || oracle_leq(t, a, oracle_perp(t, b)))
            });
        assert_eq!(c.is_mv_effect_algebra, oracle_mv, "{name}");
        assert_eq!(f.mv.is_some(), oracle_mv, "{name}");
    }
}

#[test]
fn enumeration_matches_brute_force() {
    let expected = [("chain2", 1), ("chain3", 1), ("diamond", 3), ("mo2", 13), ("luk3", 1), ("luk3xluk3", 3)];
    for (f, (name, count)) in fixtures::all().iter().zip(expected) {
        let listed: BTreeSet<Vec<Elem>> = enumerate_state_operators(&f.algebra, 9)
            .unwrap()
            .into_iter()
            .map(|t| t.0)
            .collect();
        assert_eq!(listed.len(), count, "{name}");
        if f.algebra.len() <= 6 {
            assert_eq!(listed, brute_force(f.algebra.table()), "{name}");
        }
    }
}

#[test]
fn diamond_operators() {
    let diamond = fixtures::diamond();
    let listed: Vec<Vec<Elem>> = enumerate_state_operators(&diamond, 8).unwrap().into_iter().map(|t| t.0).collect();
    assert_eq!(listed, vec![vec![0, 0, 3, 3], vec![0, 1, 2, 3], vec![0, 3, 0, 3]]);
    let collapse = validate_state_operator(&diamond, &ElementMap(vec![0, 0, 3, 3]));
    assert!(collapse.is_state_operator);
    assert_eq!(collapse.kernel, vec![0, 1]);
    assert_eq!(collapse.is_faithful, Some(false));
    assert_eq!(collapse.is_strong, Some(true));
}

#[test]
fn enumeration_refuses_above_bound() {
    let luk = fixtures::luk3_squared_effect();
    assert!(enumerate_state_operators(&luk, 8).is_err());
    assert_eq!(enumerate_state_operators(&luk, 9).unwrap().len(), 3);
}

#[test]
fn diagonal_operator_on_product() {
    let luk = fixtures::luk3_squared_effect();
    let tau = ElementMap((0..9).map(|a| 3 * (a / 3) + a / 3).collect());
    let report = validate_state_operator(&luk, &tau);
    assert!(report.is_state_operator);
    assert_eq!(report.kernel, vec![0, 1, 2]);
    let out = quotient_state_operator(&luk, &tau).unwrap();
    assert_eq!(out.quotient.algebra.len(), 3);
    let hat = validate_state_operator(&out.quotient.algebra, &out.tau_hat);
    assert_eq!(hat.is_faithful, Some(true));
}

#[test]
fn diamond_quotient_is_two_chain() {
    let out = quotient_state_operator(&fixtures::diamond(), &ElementMap(vec![0, 0, 3, 3])).unwrap();
    assert_eq!(out.quotient.algebra.len(), 2);
    assert_eq!(out.tau_hat, ElementMap::identity(2));
    assert!(validate_effect_algebra(out.quotient.algebra.table()).is_valid());
}

#[test]
fn state_space_vertices() {
    let expected = [("chain2", 1), ("chain3", 1), ("diamond", 2), ("mo2", 4), ("luk3", 1), ("luk3xluk3", 2)];
    for (f, (name, count)) in fixtures::all().iter().zip(expected) {
        let space = state_space(&f.algebra);
        assert_eq!(space.vertices().len(), count, "{name}");
        for v in space.vertices() {
            assert!(v.is_state_on(&f.algebra), "{name}");
        }
    }
    let chain3 = state_space(&fixtures::chain3());
    assert_eq!(chain3.vertices()[0].values, vec![q(0, 1), q(1, 2), q(1, 1)]);
}

#[test]
fn induced_state_composes() {
    let diamond = fixtures::diamond();
    let space = state_space(&diamond);
    let tau = ElementMap(vec![0, 3, 0, 3]);
    for omega in space.vertices() {
        let s = induced_state(&diamond, &tau, omega, space.vertices()).unwrap();
        let expected: Vec<_> = (0..4).map(|a| omega.values[tau.apply(a)].clone()).collect();
        assert_eq!(s.values, expected);
    }
}

fn arb_table() -> impl Strategy<Value = FiniteEffectAlgebra> {
    prop_oneof![
        (1usize..=4).prop_map(fixtures::chain_table),
        Just(fixtures::diamond_table()),
        Just(fixtures::mo2_table()),
        Just(mv_to_effect_algebra(&fixtures::luk3_squared()).unwrap().table().clone()),
    ]
}

proptest! {
    #[test]
    fn effect_mutations_agree_with_axioms(
        table in arb_table(),
        a in 0usize..9,
        b in 0usize..9,
        v in proptest::option::of(0usize..9),
    ) {
        let n = table.len();
        let (a, b, v) = (a % n, b % n, v.map(|v| v % n));
        let mutated = table.with_cell(a, b, v);
        let valid = EffectAlgebra::new(mutated.clone()).is_ok();
        prop_assert_eq!(valid, validate_effect_algebra(&mutated).is_valid());
        let t = &mutated;
        let oracle = (0..n).all(|x| (0..n).all(|y| t.sum(x, y) == t.sum(y, x)))
            && (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| {
                t.sum(x, y).and_then(|xy| t.sum(xy, z)) == t.sum(y, z).and_then(|yz| t.sum(x, yz))
            })))
            && (0..n).all(|x| (0..n).filter(|&y| t.sum(x, y) == Some(t.one())).count() == 1)
            && t.sum(t.one(), t.zero()) == Some(t.one())
            && (0..n).all(|x| x == t.zero() || t.sum(x, t.one()).is_none());
        prop_assert_eq!(valid, oracle);
    }

    #[test]
    fn mv_mutations_agree_with_identities(x in 0usize..9, y in 0usize..9, v in 0usize..9, neg in any::<bool>()) {
        let m = fixtures::luk3_squared();
        let mutated = if neg { m.with_neg(x, v) } else { m.with_plus(x, y, v) };
        prop_assert_eq!(validate_mv(&mutated).is_valid(), mv_identities_hold(&mutated));
    }

    #[test]
    fn chain_products_round_trip(k in 1usize..=2, l in 1usize..=2) {
        let m = MvAlgebra::product(&MvAlgebra::chain(k), &MvAlgebra::chain(l));
        prop_assert!(validate_mv(&m).is_valid());
        let e = mv_to_effect_algebra(&m).unwrap();
        prop_assert!(classify(&e).is_mv_effect_algebra);
        let back = effect_algebra_to_mv(&e).unwrap();
        prop_assert_eq!(back.boxplus_rows(), m.boxplus_rows());
        prop_assert_eq!(back.negations(), m.negations());
    }

    #[test]
    fn random_maps_classified_like_oracle(
        index in 0usize..6,
        images in proptest::collection::vec(0usize..9, 9),
    ) {
        let f = &fixtures::all()[index];
        let n = f.algebra.len();
        let mut tau: Vec<Elem> = images.into_iter().take(n).map(|x| x % n).collect();
        tau.resize(n, 0);
        tau[f.algebra.zero()] = f.algebra.zero();
        let report = validate_state_operator(&f.algebra, &ElementMap(tau.clone()));
        prop_assert_eq!(report.is_state_operator, oracle_is_state_operator(f.algebra.table(), &tau));
    }
}
