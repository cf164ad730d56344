//! Finite MV-algebras as total tables, and the dictionary between
//! MV-algebras and MV-effect algebras.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::effect::{
    classify, EffectAlgebra, Elem, FiniteEffectAlgebra, InvalidAlgebra, StructureError,
};

/// `(M; ⊞, ′, 0)` on `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MvAlgebra {
    n: usize,
    zero: Elem,
    boxplus: Vec<Elem>,
    neg: Vec<Elem>,
}

/// Identities checked by [`validate_mv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MvIdentity {
    Commutative,
    Associative,
    Neutral,
    Involution,
    Absorbing,
    Lukasiewicz,
}

impl MvIdentity {
    pub fn name(self) -> &'static str {
        match self {
            MvIdentity::Commutative => "COMM",
            MvIdentity::Associative => "ASSOC",
            MvIdentity::Neutral => "ZERO",
            MvIdentity::Involution => "INVOLUTION",
            MvIdentity::Absorbing => "ABSORB",
            MvIdentity::Lukasiewicz => "LUKASIEWICZ",
        }
    }
}

impl fmt::Display for MvIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvViolation {
    pub identity: MvIdentity,
    pub witness: Vec<Elem>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MvReport {
    pub violations: Vec<MvViolation>,
}

impl MvReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, identity: MvIdentity) -> bool {
        self.violations.iter().any(|v| v.identity == identity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MvError {
    #[error("not an MV-algebra ({} identity failure(s))", .0.violations.len())]
    NotMv(MvReport),
    #[error("effect algebra is not an MV-effect algebra")]
    NotMvEffectAlgebra,
    #[error("translated table is not an effect algebra: {0}")]
    Translation(InvalidAlgebra),
    #[error("boolean skeleton is not closed under the operations at {0:?}")]
    SkeletonNotClosed(Vec<Elem>),
}

impl MvAlgebra {
    pub fn from_tables(
        zero: Elem,
        boxplus: Vec<Vec<Elem>>,
        neg: Vec<Elem>,
    ) -> Result<Self, StructureError> {
        let n = neg.len();
        if n == 0 {
            return Err(StructureError::Empty);
        }
        if boxplus.len() != n {
            return Err(StructureError::RowCount {
                rows: boxplus.len(),
                expected: n,
            });
        }
        if zero >= n {
            return Err(StructureError::OutOfRange {
                what: "zero",
                index: zero,
                n,
            });
        }
        let mut flat = Vec::with_capacity(n * n);
        for (row, entries) in boxplus.into_iter().enumerate() {
            if entries.len() != n {
                return Err(StructureError::Ragged {
                    row,
                    len: entries.len(),
                    expected: n,
                });
            }
            flat.extend(entries);
        }
        if let Some(&index) = flat.iter().find(|&&v| v >= n) {
            return Err(StructureError::OutOfRange {
                what: "boxplus entry",
                index,
                n,
            });
        }
        if let Some(&index) = neg.iter().find(|&&v| v >= n) {
            return Err(StructureError::OutOfRange {
                what: "neg entry",
                index,
                n,
            });
        }
        Ok(Self {
            n,
            zero,
            boxplus: flat,
            neg,
        })
    }

    /// Łukasiewicz chain `{0, 1/k, .., 1}` with truncated addition.
    pub fn chain(k: usize) -> Self {
        let boxplus = (0..=k)
            .map(|a| (0..=k).map(|b| (a + b).min(k)).collect())
            .collect();
        let neg = (0..=k).map(|a| k - a).collect();
        Self::from_tables(0, boxplus, neg).expect("chain tables are well formed")
    }

    /// Direct product; element `(x, y)` has index `x * right.len() + y`.
    pub fn product(left: &MvAlgebra, right: &MvAlgebra) -> Self {
        let m = right.n;
        let pair = |x: Elem, y: Elem| x * m + y;
        let n = left.n * m;
        let boxplus = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| pair(left.plus(a / m, b / m), right.plus(a % m, b % m)))
                    .collect()
            })
            .collect();
        let neg = (0..n).map(|a| pair(left.neg(a / m), right.neg(a % m))).collect();
        Self::from_tables(pair(left.zero, right.zero), boxplus, neg)
            .expect("product tables are well formed")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn elements(&self) -> core::ops::Range<Elem> {
        0..self.n
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn one(&self) -> Elem {
        self.neg[self.zero]
    }

    pub fn plus(&self, a: Elem, b: Elem) -> Elem {
        self.boxplus[a * self.n + b]
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a]
    }

    pub fn boxplus_rows(&self) -> Vec<Vec<Elem>> {
        self.boxplus.chunks(self.n).map(<[_]>::to_vec).collect()
    }

    pub fn negations(&self) -> &[Elem] {
        &self.neg
    }

    pub fn with_plus(&self, a: Elem, b: Elem, value: Elem) -> Self {
        let mut out = self.clone();
        out.boxplus[a * self.n + b] = value;
        out
    }

    pub fn with_neg(&self, a: Elem, value: Elem) -> Self {
        let mut out = self.clone();
        out.neg[a] = value;
        out
    }

    /// `x ⊡ y = (x′ ⊞ y′)′`
    pub fn times(&self, x: Elem, y: Elem) -> Elem {
        self.neg(self.plus(self.neg(x), self.neg(y)))
    }

    /// `x ∨ y = (x′ ⊞ y)′ ⊞ y`
    pub fn vee(&self, x: Elem, y: Elem) -> Elem {
        self.plus(self.neg(self.plus(self.neg(x), y)), y)
    }

    /// `x ∧ y = (x′ ∨ y′)′`
    pub fn wedge(&self, x: Elem, y: Elem) -> Elem {
        self.neg(self.vee(self.neg(x), self.neg(y)))
    }

    /// `x ⊟ y = (x′ ⊞ y)′`
    pub fn minus(&self, x: Elem, y: Elem) -> Elem {
        self.neg(self.plus(self.neg(x), y))
    }

    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.vee(x, y) == y
    }
}

/// Checks the MV-algebra identities exhaustively.
pub fn validate_mv(m: &MvAlgebra) -> MvReport {
    let mut violations = Vec::new();
    let mut fail = |identity, witness: Vec<Elem>| violations.push(MvViolation { identity, witness });
    let one = m.one();
    for x in m.elements() {
        if m.plus(x, m.zero()) != x {
            fail(MvIdentity::Neutral, vec![x]);
        }
        if m.neg(m.neg(x)) != x {
            fail(MvIdentity::Involution, vec![x]);
        }
        if m.plus(x, one) != one {
            fail(MvIdentity::Absorbing, vec![x]);
        }
        for y in m.elements() {
            if y > x && m.plus(x, y) != m.plus(y, x) {
                fail(MvIdentity::Commutative, vec![x, y]);
            }
            let left = m.plus(x, m.neg(m.plus(x, m.neg(y))));
            let right = m.plus(y, m.neg(m.plus(y, m.neg(x))));
            if y > x && left != right {
                fail(MvIdentity::Lukasiewicz, vec![x, y]);
            }
            for z in m.elements() {
                if m.plus(m.plus(x, y), z) != m.plus(x, m.plus(y, z)) {
                    fail(MvIdentity::Associative, vec![x, y, z]);
                }
            }
        }
    }
    MvReport { violations }
}

/// Tables of the derived operations `⊡`, `∨`, `∧`, `⊟`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvDerivedOps {
    pub boxdot: Vec<Vec<Elem>>,
    pub vee: Vec<Vec<Elem>>,
    pub wedge: Vec<Vec<Elem>>,
    pub boxminus: Vec<Vec<Elem>>,
}

impl MvDerivedOps {
    pub fn compute(m: &MvAlgebra) -> Self {
        let table = |op: &dyn Fn(Elem, Elem) -> Elem| -> Vec<Vec<Elem>> {
            m.elements()
                .map(|x| m.elements().map(|y| op(x, y)).collect())
                .collect()
        };
        Self {
            boxdot: table(&|x, y| m.times(x, y)),
            vee: table(&|x, y| m.vee(x, y)),
            wedge: table(&|x, y| m.wedge(x, y)),
            boxminus: table(&|x, y| m.minus(x, y)),
        }
    }
}

fn require_mv(m: &MvAlgebra) -> Result<(), MvError> {
    let report = validate_mv(m);
    if report.is_valid() {
        Ok(())
    } else {
        Err(MvError::NotMv(report))
    }
}

/// `a ⊕ b` is defined iff `a ⊡ b = 0`, and then equals `a ⊞ b`.
pub fn mv_to_effect_algebra(m: &MvAlgebra) -> Result<EffectAlgebra, MvError> {
    require_mv(m)?;
    let table = FiniteEffectAlgebra::from_fn(m.len(), m.zero(), m.one(), |a, b| {
        (m.times(a, b) == m.zero()).then(|| m.plus(a, b))
    })
    .expect("indices come from a well-formed table");
    EffectAlgebra::new(table).map_err(MvError::Translation)
}

/// `a ⊞ b := a ⊕ (a⊥ ∧ b)` and `a′ := a⊥`.
pub fn effect_algebra_to_mv(e: &EffectAlgebra) -> Result<MvAlgebra, MvError> {
    if !classify(e).is_mv_effect_algebra {
        return Err(MvError::NotMvEffectAlgebra);
    }
    let boxplus = e
        .elements()
        .map(|a| {
            e.elements()
                .map(|b| {
                    let meet = e.meet(e.perp(a), b).expect("MV-effect algebras are lattices");
                    e.sum(a, meet).expect("a ⊥ (a⊥ ∧ b) in an effect algebra")
                })
                .collect()
        })
        .collect();
    let neg = e.elements().map(|a| e.perp(a)).collect();
    let m = MvAlgebra::from_tables(e.zero(), boxplus, neg).expect("indices in range");
    require_mv(&m)?;
    Ok(m)
}

/// All idempotents `a ⊞ a = a`, checked to be closed under `⊞` and `′`.
pub fn boolean_skeleton(m: &MvAlgebra) -> Result<Vec<Elem>, MvError> {
    require_mv(m)?;
    let skeleton: Vec<Elem> = m.elements().filter(|&a| m.plus(a, a) == a).collect();
    let member = |a: Elem| skeleton.contains(&a);
    for &a in &skeleton {
        if !member(m.neg(a)) {
            return Err(MvError::SkeletonNotClosed(vec![a]));
        }
        for &b in &skeleton {
            if !member(m.plus(a, b)) {
                return Err(MvError::SkeletonNotClosed(vec![a, b]));
            }
        }
    }
    Ok(skeleton)
}

/// `aΔb = (a ∨ b) ⊖ (a ∧ b)`; in MV terms `(a ∨ b) ⊟ (a ∧ b)`.
pub fn symmetric_difference(m: &MvAlgebra, a: Elem, b: Elem) -> Elem {
    m.minus(m.vee(a, b), m.wedge(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn boolean4() -> MvAlgebra {
        MvAlgebra::product(&MvAlgebra::chain(1), &MvAlgebra::chain(1))
    }

    #[test]
    fn chains_and_products_are_valid() {
        assert!(validate_mv(&MvAlgebra::chain(2)).is_valid());
        let b = boolean4();
        assert!(validate_mv(&b).is_valid());
        assert!(b.elements().all(|a| b.plus(a, a) == a));
        assert!(validate_mv(&fixtures::luk3_squared()).is_valid());
    }

    #[test]
    fn broken_involution_is_reported() {
        let broken = MvAlgebra::chain(2).with_neg(1, 0);
        let report = validate_mv(&broken);
        assert!(report.violates(MvIdentity::Involution));
        assert!(report
            .violations
            .contains(&MvViolation { identity: MvIdentity::Involution, witness: vec![1] }));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            MvAlgebra::from_tables(0, vec![vec![0, 1], vec![1]], vec![1, 0]),
            Err(StructureError::Ragged { row: 1, .. })
        ));
        assert!(matches!(
            MvAlgebra::from_tables(0, vec![vec![0, 1], vec![1, 1]], vec![1, 7]),
            Err(StructureError::OutOfRange { index: 7, .. })
        ));
    }

    #[test]
    fn dictionary_round_trips() {
        let luk3 = MvAlgebra::chain(2);
        let e = mv_to_effect_algebra(&luk3).unwrap();
        assert_eq!(e.table(), fixtures::chain3().table());
        assert_eq!(effect_algebra_to_mv(&e).unwrap(), luk3);

        let diamond = fixtures::diamond();
        let b = effect_algebra_to_mv(&diamond).unwrap();
        assert!(b.elements().all(|a| b.plus(a, a) == a));
        assert_eq!(mv_to_effect_algebra(&b).unwrap().table(), diamond.table());

        let two = MvAlgebra::chain(1);
        assert_eq!(mv_to_effect_algebra(&two).unwrap().table(), fixtures::chain2().table());
        assert_eq!(effect_algebra_to_mv(&fixtures::mo2()), Err(MvError::NotMvEffectAlgebra));
    }

    #[test]
    fn skeletons() {
        assert_eq!(boolean_skeleton(&MvAlgebra::chain(2)).unwrap(), vec![0, 2]);
        assert_eq!(boolean_skeleton(&boolean4()).unwrap(), vec![0, 1, 2, 3]);
        // Ł3 × Ł3: (x, y) ↦ 3x + y; characteristic vectors have x, y ∈ {0, 2}.
        assert_eq!(boolean_skeleton(&fixtures::luk3_squared()).unwrap(), vec![0, 2, 6, 8]);
    }

    #[test]
    fn symmetric_differences() {
        let luk3 = MvAlgebra::chain(2);
        assert_eq!(symmetric_difference(&luk3, 1, 2), 1);
        assert_eq!(symmetric_difference(&luk3, 1, 1), 0);
        let b = boolean4();
        assert_eq!(symmetric_difference(&b, 1, 2), 3);
    }

    #[test]
    fn derived_operations_on_chain() {
        let ops = MvDerivedOps::compute(&MvAlgebra::chain(2));
        assert_eq!(ops.boxdot, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 2]]);
        assert_eq!(ops.vee, vec![vec![0, 1, 2], vec![1, 1, 2], vec![2, 2, 2]]);
        assert_eq!(ops.wedge, vec![vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]]);
        assert_eq!(ops.boxminus, vec![vec![0, 0, 0], vec![1, 0, 0], vec![2, 1, 0]]);
    }
}
