use nalgebra::DVector;
use proptest::prelude::*;
use stateop_core::jc::random as jr;
use stateop_core::jc::{
    check_state_operator, coords, decompose, distance, from_coords, hermitian_basis, is_conditional_expectation,
    is_faithful, kadison_schwarz_check, luders_operator, min_eigenvalue, support_projection, vector_state_operator,
    CMatrix, HermitianEffect, HermitianMap, Pvm, Tolerances, C,
};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn diag(entries: &[f64]) -> CMatrix {
    let d = entries.len();
    CMatrix::from_fn(d, d, |i, j| C::new(if i == j { entries[i] } else { 0.0 }, 0.0))
}

fn corner() -> HermitianMap {
    vector_state_operator(&DVector::from_vec(vec![C::new(1.0, 0.0), C::new(0.0, 0.0)]))
}

fn pinching(d: usize) -> HermitianMap {
    let projections = (0..d)
        .map(|k| diag(&(0..d).map(|i| (i == k) as u8 as f64).collect::<Vec<_>>()))
        .collect();
    luders_operator(&Pvm::new(projections, &tol()).unwrap())
}

fn trace_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b).trace().re
}

#[test]
fn hermitian_basis_is_orthonormal() {
    for d in 1..=4 {
        let basis = hermitian_basis(d);
        assert_eq!(basis.len(), d * d);
        for (i, a) in basis.iter().enumerate() {
            assert!(distance(a, &a.adjoint()) < 1e-15);
            for (j, b) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((trace_inner(a, b) - expected).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn corner_map_coordinates() {
    let m = corner();
    let expected = [[1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0; 4], [0.0; 4]];
    for (i, row) in expected.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            assert!((m.matrix()[(i, j)] - x).abs() < 1e-15, "entry ({i}, {j})");
        }
    }
}

#[test]
fn corner_decomposes_through_pinching() {
    let dec = decompose(&corner(), &tol(), 1).unwrap();
    assert!(dec.mu.distance(&pinching(2)) < 1e-8);
    assert!(dec.composition_residual < 1e-8);
    assert!(distance(&dec.support, &diag(&[1.0, 0.0])) < 1e-8);
    assert!(is_faithful(&dec.mu, &tol()));
}

#[test]
fn support_of_corner() {
    let s = support_projection(&corner(), &tol(), 3).unwrap();
    assert!(distance(&s.projection, &diag(&[1.0, 0.0])) < 1e-8);
    assert!(!is_faithful(&corner(), &tol()));
}

#[test]
fn pinching_example() {
    let m = pinching(2);
    let a = CMatrix::from_fn(2, 2, |i, j| C::new(if i == j { 0.5 } else { 0.3 }, 0.0));
    assert!(distance(&m.apply(&a), &diag(&[0.5, 0.5])) < 1e-15);
    assert!(check_state_operator(&m, &tol(), 0).is_state_operator());
    assert!(is_conditional_expectation(&m, &tol(), 0).unwrap().holds);
    let gaps = kadison_schwarz_check(&m, &HermitianEffect::new(a, &tol()).unwrap()).unwrap();
    assert!(gaps.lhs_gap.abs() < 1e-12);
    assert!((gaps.rhs_gap - 0.09).abs() < 1e-12);
}

#[test]
fn non_idempotent_map_is_rejected() {
    let half = HermitianMap::from_fn(2, |x| x.scale(0.5) + CMatrix::identity(2, 2).scale(x.trace().re / 4.0));
    assert!(!check_state_operator(&half, &tol(), 0).is_state_operator());
}

fn apply_directly(pvm: &Pvm, a: &CMatrix) -> CMatrix {
    pvm.projections().iter().map(|p| p * a * p).fold(CMatrix::zeros(a.nrows(), a.ncols()), |s, x| s + x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coordinates_round_trip(seed in any::<u64>(), d in 1usize..=5) {
        let mut rng = jr::rng(seed);
        let h = jr::random_hermitian(d, &mut rng);
        let v = coords(&h);
        prop_assert!(distance(&from_coords(&v, d), &h) < 1e-12);
        let basis = hermitian_basis(d);
        for (k, b) in basis.iter().enumerate() {
            prop_assert!((v[k] - trace_inner(b, &h)).abs() < 1e-12);
        }
    }

    #[test]
    fn luders_matches_direct_sum(seed in any::<u64>(), d in 1usize..=5) {
        let mut rng = jr::rng(seed);
        let blocks = 1 + (seed as usize) % d;
        let pvm = jr::random_pvm(d, blocks, &mut rng);
        let m = luders_operator(&pvm);
        let a = jr::random_effect(d, &mut rng);
        prop_assert!(distance(&m.apply(&a), &apply_directly(&pvm, &a)) < 1e-10);
        prop_assert!(m.compose(&m).distance(&m) < 1e-10);
        prop_assert!(m.adjoint().distance(&m) < 1e-10);
        let gaps = kadison_schwarz_check(&m, &HermitianEffect::new(a, &tol()).unwrap()).unwrap();
        prop_assert!(gaps.holds(&tol()));
    }

    #[test]
    fn block_maps_are_state_operators(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = jr::rng(seed);
        let spec = jr::random_block_map(d, &mut rng);
        let m = spec.map();
        prop_assert!(check_state_operator(&m, &tol(), seed).is_state_operator());
        let a = jr::random_effect(d, &mut rng);
        prop_assert!(min_eigenvalue(&m.apply(&a)) > -1e-9);
        prop_assert!(distance(&m.apply(&CMatrix::identity(d, d)), &CMatrix::identity(d, d)) < 1e-10);
        let s = support_projection(&m, &tol(), seed).unwrap();
        prop_assert!(distance(&s.projection, &spec.expected_support()) < 1e-8);
    }

    #[test]
    fn composition_matches_application(seed in any::<u64>(), d in 1usize..=4) {
        let mut rng = jr::rng(seed);
        let p = luders_operator(&jr::random_pvm(d, d, &mut rng));
        let q = jr::random_block_map(d.max(2), &mut rng).map();
        if q.dim() == d {
            let a = jr::random_hermitian(d, &mut rng);
            prop_assert!(distance(&p.compose(&q).apply(&a), &p.apply(&q.apply(&a))) < 1e-10);
        }
    }
}
