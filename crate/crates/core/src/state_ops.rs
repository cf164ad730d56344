//! State operators (internal states) on finite effect algebras.
//!
//! A state operator is a unital, additive, idempotent self-map. This module
//! validates candidate maps, enumerates all state operators of a small
//! algebra by backtracking, quotients an MV-effect algebra by the kernel of a
//! state operator, and composes state operators with states.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::effect::{
    classify, is_ideal, is_ordering_set, is_subeffect_algebra, ordering_witness, quotient_mv,
    EffectAlgebra, Elem, Quotient, QuotientError, StateDefect, StateVector,
};

/// Default largest algebra accepted by [`enumerate_state_operators`].
pub const DEFAULT_ENUMERATION_BOUND: usize = 8;

/// A total self-map given by the image of every element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementMap(pub Vec<Elem>);

impl ElementMap {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn apply(&self, a: Elem) -> Elem {
        self.0[a]
    }

    pub fn images(&self) -> &[Elem] {
        &self.0
    }
}

/// Defining clauses of a state operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TauClause {
    /// Wrong length or an image index out of range.
    Shape,
    /// `τ(1) = 1`
    Unital,
    /// `τ(e ⊕ f) = τ(e) ⊕ τ(f)`, both sides defined.
    Additive,
    /// `τ(τ(a)) = τ(a)`
    Idempotent,
}

impl TauClause {
    pub fn name(self) -> &'static str {
        match self {
            TauClause::Shape => "shape",
            TauClause::Unital => "(i)",
            TauClause::Additive => "(ii)",
            TauClause::Idempotent => "(iii)",
        }
    }
}

/// Consequences every state operator must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Consequence {
    /// `τ(0) = 0`
    Zero,
    /// `τ(a⊥) = τ(a)⊥`
    Orthosupplement,
    /// `a ≤ b` implies `τ(a) ≤ τ(b)` and `τ(b ⊖ a) = τ(b) ⊖ τ(a)`
    Monotone,
    /// `τ(a ∧ b) ≤ τ(a), τ(b)` and `τ(a), τ(b) ≤ τ(a ∨ b)` when they exist
    Bounds,
    /// `τ(E)` is a sub-effect algebra
    RangeSubalgebra,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseViolation<C> {
    pub clause: C,
    pub witness: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateOperatorReport {
    pub is_state_operator: bool,
    pub violated: Vec<ClauseViolation<TauClause>>,
    /// Failed consequences; always empty for a genuine state operator.
    pub consequences: Vec<ClauseViolation<Consequence>>,
    /// Set only for state operators.
    pub is_strong: Option<bool>,
    /// Pair `(a, b)` with `τ(a) ∧ τ(b)` existing but not fixed by `τ`.
    pub strong_witness: Option<(Elem, Elem)>,
    pub is_faithful: Option<bool>,
    /// `I_τ = {a : τ(a) = 0}`.
    pub kernel: Vec<Elem>,
}

pub fn validate_state_operator(algebra: &EffectAlgebra, tau: &ElementMap) -> StateOperatorReport {
    let n = algebra.len();
    let mut violated = Vec::new();
    if tau.0.len() != n || tau.0.iter().any(|&v| v >= n) {
        violated.push(ClauseViolation {
            clause: TauClause::Shape,
            witness: Vec::new(),
        });
        return StateOperatorReport {
            is_state_operator: false,
            violated,
            consequences: Vec::new(),
            is_strong: None,
            strong_witness: None,
            is_faithful: None,
            kernel: Vec::new(),
        };
    }
    let t = |a: Elem| tau.apply(a);

    if t(algebra.one()) != algebra.one() {
        violated.push(ClauseViolation {
            clause: TauClause::Unital,
            witness: vec![algebra.one()],
        });
    }
    for (e, f, s) in algebra.defined_sums() {
        if algebra.sum(t(e), t(f)) != Some(t(s)) {
            violated.push(ClauseViolation {
                clause: TauClause::Additive,
                witness: vec![e, f],
            });
        }
    }
    for a in algebra.elements() {
        if t(t(a)) != t(a) {
            violated.push(ClauseViolation {
                clause: TauClause::Idempotent,
                witness: vec![a],
            });
        }
    }
    let kernel: Vec<Elem> = algebra.elements().filter(|&a| t(a) == algebra.zero()).collect();
    let is_state_operator = violated.is_empty();
    if !is_state_operator {
        return StateOperatorReport {
            is_state_operator,
            violated,
            consequences: Vec::new(),
            is_strong: None,
            strong_witness: None,
            is_faithful: None,
            kernel,
        };
    }

    let consequences = check_consequences(algebra, tau);
    let strong_witness = algebra.elements().find_map(|a| {
        algebra.elements().find_map(|b| {
            let meet = algebra.meet(t(a), t(b))?;
            (t(meet) != meet).then_some((a, b))
        })
    });
    StateOperatorReport {
        is_state_operator,
        violated,
        consequences,
        is_strong: Some(strong_witness.is_none()),
        strong_witness,
        is_faithful: Some(kernel == [algebra.zero()]),
        kernel,
    }
}

fn check_consequences(algebra: &EffectAlgebra, tau: &ElementMap) -> Vec<ClauseViolation<Consequence>> {
    let t = |a: Elem| tau.apply(a);
    let mut out = Vec::new();
    let mut fail = |clause, witness: Vec<Elem>| out.push(ClauseViolation { clause, witness });

    if t(algebra.zero()) != algebra.zero() {
        fail(Consequence::Zero, vec![algebra.zero()]);
    }
    for a in algebra.elements() {
        if t(algebra.perp(a)) != algebra.perp(t(a)) {
            fail(Consequence::Orthosupplement, vec![a]);
        }
        for b in algebra.elements() {
            if algebra.leq(a, b) {
                let difference = algebra.ominus(b, a).expect("a ≤ b");
                if !algebra.leq(t(a), t(b)) || algebra.ominus(t(b), t(a)) != Some(t(difference)) {
                    fail(Consequence::Monotone, vec![a, b]);
                }
            }
            if let Some(m) = algebra.meet(a, b) {
                if !algebra.leq(t(m), t(a)) || !algebra.leq(t(m), t(b)) {
                    fail(Consequence::Bounds, vec![a, b]);
                }
            }
            if let Some(j) = algebra.join(a, b) {
                if !algebra.leq(t(a), t(j)) || !algebra.leq(t(b), t(j)) {
                    fail(Consequence::Bounds, vec![a, b]);
                }
            }
        }
    }
    let mut range: Vec<Elem> = algebra.elements().map(t).collect();
    range.sort_unstable();
    range.dedup();
    if !is_subeffect_algebra(algebra, &range) {
        fail(Consequence::RangeSubalgebra, range);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerationError {
    #[error("{n} elements exceed the enumeration bound {bound}; refusing a search over {candidates} candidate maps")]
    BoundExceeded {
        n: usize,
        bound: usize,
        candidates: BigUint,
    },
}

/// Every state operator on `algebra`, in lexicographic order of images.
///
/// Backtracks over `τ(0), .., τ(n-1)` with `τ(0) = 0` and `τ(1) = 1` fixed,
/// checking each additivity constraint as soon as its three elements are
/// assigned; idempotence is checked on complete maps.
pub fn enumerate_state_operators(
    algebra: &EffectAlgebra,
    bound: usize,
) -> Result<Vec<ElementMap>, EnumerationError> {
    let n = algebra.len();
    if n > bound {
        return Err(EnumerationError::BoundExceeded {
            n,
            bound,
            candidates: BigUint::from(n).pow(n as u32),
        });
    }
    let fixed = |a: Elem| a == algebra.zero() || a == algebra.one();
    // Constraints grouped by the last free element they mention.
    let mut due: Vec<Vec<(Elem, Elem, Elem)>> = vec![Vec::new(); n + 1];
    for (a, b, c) in algebra.defined_sums() {
        let last = [a, b, c].into_iter().filter(|&x| !fixed(x)).max();
        due[last.map_or(n, |x| x)].push((a, b, c));
    }
    let mut images = vec![usize::MAX; n];
    images[algebra.zero()] = algebra.zero();
    images[algebra.one()] = algebra.one();
    let consistent = |images: &[Elem], constraints: &[(Elem, Elem, Elem)]| {
        constraints
            .iter()
            .all(|&(a, b, c)| algebra.sum(images[a], images[b]) == Some(images[c]))
    };
    let mut found = Vec::new();
    if !consistent(&images, &due[n]) {
        return Ok(found);
    }

    struct Search<'a, F: Fn(&[Elem], &[(Elem, Elem, Elem)]) -> bool> {
        n: usize,
        due: &'a [Vec<(Elem, Elem, Elem)>],
        consistent: F,
        fixed: &'a dyn Fn(Elem) -> bool,
    }
    impl<F: Fn(&[Elem], &[(Elem, Elem, Elem)]) -> bool> Search<'_, F> {
        fn run(&self, next: Elem, images: &mut Vec<Elem>, found: &mut Vec<ElementMap>) {
            if next == self.n {
                if (0..self.n).all(|a| images[images[a]] == images[a]) {
                    found.push(ElementMap(images.clone()));
                }
                return;
            }
            if (self.fixed)(next) {
                self.run(next + 1, images, found);
                return;
            }
            for value in 0..self.n {
                images[next] = value;
                if (self.consistent)(images, &self.due[next]) {
                    self.run(next + 1, images, found);
                }
            }
            images[next] = usize::MAX;
        }
    }
    let search = Search {
        n,
        due: &due,
        consistent,
        fixed: &fixed,
    };
    search.run(0, &mut images, &mut found);
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuotientOperatorError {
    #[error("algebra is not an MV-effect algebra")]
    NotMv,
    #[error("map is not a state operator")]
    NotStateOperator(StateOperatorReport),
    #[error("kernel {0:?} is not an ideal")]
    KernelNotIdeal(Vec<Elem>),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error("[{0}] = [{1}] but their images fall in different classes")]
    NotWellDefined(Elem, Elem),
    #[error("induced map on the quotient is not a faithful state operator")]
    NotFaithful(StateOperatorReport),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientOperator {
    pub quotient: Quotient,
    pub tau_hat: ElementMap,
    pub report: StateOperatorReport,
}

/// `τ̂[a] := [τ(a)]` on `M | I_τ`.
pub fn quotient_state_operator(
    algebra: &EffectAlgebra,
    tau: &ElementMap,
) -> Result<QuotientOperator, QuotientOperatorError> {
    if !classify(algebra).is_mv_effect_algebra {
        return Err(QuotientOperatorError::NotMv);
    }
    let report = validate_state_operator(algebra, tau);
    if !report.is_state_operator {
        return Err(QuotientOperatorError::NotStateOperator(report));
    }
    if !is_ideal(algebra, &report.kernel) {
        return Err(QuotientOperatorError::KernelNotIdeal(report.kernel));
    }
    let quotient = quotient_mv(algebra, &report.kernel)?;
    let class = |a: Elem| quotient.class(a);
    for a in algebra.elements() {
        for b in algebra.elements() {
            if class(a) == class(b) && class(tau.apply(a)) != class(tau.apply(b)) {
                return Err(QuotientOperatorError::NotWellDefined(a, b));
            }
        }
    }
    let tau_hat = ElementMap(
        quotient
            .representatives
            .iter()
            .map(|&r| class(tau.apply(r)))
            .collect(),
    );
    let hat_report = validate_state_operator(&quotient.algebra, &tau_hat);
    if !hat_report.is_state_operator || hat_report.is_faithful != Some(true) {
        return Err(QuotientOperatorError::NotFaithful(hat_report));
    }
    Ok(QuotientOperator {
        quotient,
        tau_hat,
        report: hat_report,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InducedStateError {
    #[error("map is not a state operator")]
    NotStateOperator,
    #[error("supplied vector is not a state: {0:?}")]
    NotAState(StateDefect),
    #[error("the state is not a member of the supplied ordering set")]
    NotInOrderingSet,
    #[error("supplied set is not ordering: ({0}, {1}) is dominated but not ordered")]
    NotOrdering(Elem, Elem),
    #[error("composite ω∘τ is not a state: {0:?}")]
    CompositeNotAState(StateDefect),
}

/// `s = ω ∘ τ` for a member `ω` of an ordering set of states.
pub fn induced_state(
    algebra: &EffectAlgebra,
    tau: &ElementMap,
    omega: &StateVector,
    ordering_set: &[StateVector],
) -> Result<StateVector, InducedStateError> {
    if !validate_state_operator(algebra, tau).is_state_operator {
        return Err(InducedStateError::NotStateOperator);
    }
    for s in core::iter::once(omega).chain(ordering_set) {
        if let Some(defect) = s.defect(algebra) {
            return Err(InducedStateError::NotAState(defect));
        }
    }
    if !ordering_set.contains(omega) {
        return Err(InducedStateError::NotInOrderingSet);
    }
    if !is_ordering_set(algebra, ordering_set) {
        let (e, f) = ordering_witness(algebra, ordering_set).expect("not ordering");
        return Err(InducedStateError::NotOrdering(e, f));
    }
    let induced = StateVector::new(
        algebra
            .elements()
            .map(|a| omega.value(tau.apply(a)).clone())
            .collect(),
    );
    match induced.defect(algebra) {
        Some(defect) => Err(InducedStateError::CompositeNotAState(defect)),
        None => Ok(induced),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect::state_space;
    use crate::fixtures;
    use crate::rational::{q, Q};

    #[test]
    fn identity_is_strong_and_faithful() {
        for fixture in fixtures::all() {
            let report =
                validate_state_operator(&fixture.algebra, &ElementMap::identity(fixture.algebra.len()));
            assert!(report.is_state_operator, "{}", fixture.name);
            assert_eq!(report.is_strong, Some(true));
            assert_eq!(report.is_faithful, Some(true));
            assert!(report.consequences.is_empty());
        }
    }

    #[test]
    fn diamond_collapse_is_strong_not_faithful() {
        let report = validate_state_operator(&fixtures::diamond(), &ElementMap(vec![0, 0, 3, 3]));
        assert!(report.is_state_operator);
        assert_eq!(report.is_strong, Some(true));
        assert_eq!(report.is_faithful, Some(false));
        assert_eq!(report.kernel, vec![0, 1]);
    }

    #[test]
    fn swap_fails_idempotence() {
        let report = validate_state_operator(&fixtures::diamond(), &ElementMap(vec![0, 2, 1, 3]));
        assert!(!report.is_state_operator);
        assert!(report
            .violated
            .contains(&ClauseViolation { clause: TauClause::Idempotent, witness: vec![1] }));
        assert_eq!(report.is_strong, None);
    }

    #[test]
    fn malformed_map_is_a_shape_violation() {
        let report = validate_state_operator(&fixtures::chain3(), &ElementMap(vec![0, 1]));
        assert_eq!(report.violated[0].clause, TauClause::Shape);
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(
            enumerate_state_operators(&fixtures::chain3(), 8).unwrap(),
            vec![ElementMap::identity(3)]
        );
        assert_eq!(
            enumerate_state_operators(&fixtures::diamond(), 8).unwrap(),
            vec![ElementMap(vec![0, 0, 3, 3]), ElementMap(vec![0, 1, 2, 3]), ElementMap(vec![0, 3, 0, 3])]
        );
        assert_eq!(
            enumerate_state_operators(&fixtures::chain2(), 8).unwrap(),
            vec![ElementMap::identity(2)]
        );
    }

    #[test]
    fn enumeration_refuses_large_algebras() {
        let err = enumerate_state_operators(&fixtures::luk3_squared_effect(), 8).unwrap_err();
        assert_eq!(
            err,
            EnumerationError::BoundExceeded { n: 9, bound: 8, candidates: BigUint::from(387_420_489u64) }
        );
    }

    #[test]
    fn quotient_of_diamond_collapse() {
        let out = quotient_state_operator(&fixtures::diamond(), &ElementMap(vec![0, 0, 3, 3])).unwrap();
        assert_eq!(out.quotient.algebra.table(), fixtures::chain2().table());
        assert_eq!(out.tau_hat, ElementMap::identity(2));
    }

    #[test]
    fn quotient_of_faithful_operator_is_isomorphic() {
        let diamond = fixtures::diamond();
        let out = quotient_state_operator(&diamond, &ElementMap::identity(4)).unwrap();
        assert_eq!(out.quotient.algebra.table(), diamond.table());
        assert_eq!(out.tau_hat, ElementMap::identity(4));
    }

    #[test]
    fn quotient_of_product_projection() {
        // τ(x, y) = (x, x) on Ł3 × Ł3.
        let algebra = fixtures::luk3_squared_effect();
        let tau = ElementMap((0..9).map(|i| 3 * (i / 3) + i / 3).collect());
        assert!(validate_state_operator(&algebra, &tau).is_state_operator);
        let out = quotient_state_operator(&algebra, &tau).unwrap();
        assert_eq!(validate_state_operator(&algebra, &tau).kernel, vec![0, 1, 2]);
        assert_eq!(out.quotient.algebra.len(), 3);
        assert_eq!(out.report.is_faithful, Some(true));
    }

    #[test]
    fn quotient_requires_mv() {
        assert_eq!(
            quotient_state_operator(&fixtures::mo2(), &ElementMap::identity(6)),
            Err(QuotientOperatorError::NotMv)
        );
    }

    #[test]
    fn induced_states() {
        let diamond = fixtures::diamond();
        let state = |t: Q| StateVector::new(vec![q(0, 1), t.clone(), q(1, 1) - t, q(1, 1)]);
        let set = [state(q(1, 3)), state(q(2, 3))];
        let tau = ElementMap(vec![0, 0, 3, 3]);
        let s = induced_state(&diamond, &tau, &set[0], &set).unwrap();
        assert_eq!(s, StateVector::new(vec![q(0, 1), q(0, 1), q(1, 1), q(1, 1)]));
        assert_eq!(
            induced_state(&diamond, &ElementMap::identity(4), &set[1], &set).unwrap(),
            set[1]
        );

        let chain = fixtures::chain3();
        let vertices = state_space(&chain).vertices().to_vec();
        let s = induced_state(&chain, &ElementMap::identity(3), &vertices[0], &vertices).unwrap();
        assert_eq!(s.values[1], q(1, 2));

        let bogus = StateVector::new(vec![q(0, 1), q(1, 2), q(1, 2), q(1, 2)]);
        assert!(matches!(
            induced_state(&diamond, &tau, &bogus, &set),
            Err(InducedStateError::NotAState(StateDefect::NotUnital))
        ));
        let half = [state(q(1, 2))];
        assert_eq!(
            induced_state(&diamond, &tau, &half[0], &half),
            Err(InducedStateError::NotOrdering(1, 2))
        );
    }
}
