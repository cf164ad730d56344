//! Finite effect algebras given as partial Cayley tables.
//!
//! A [`FiniteEffectAlgebra`] is only structurally checked on construction
//! (square table, indices in range). [`validate_effect_algebra`] checks the
//! four axioms and reports every failure with a witness; [`EffectAlgebra`]
//! is the validated form that carries the derived order, orthosupplement,
//! difference, and meet/join tables.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{self, Q};

/// Index of an element of a finite algebra.
pub type Elem = usize;

/// Malformed input, as opposed to an axiom failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("an algebra needs at least one element")]
    Empty,
    #[error("table has {rows} rows, expected {expected}")]
    RowCount { rows: usize, expected: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("{what} index {index} is out of range for {n} elements")]
    OutOfRange {
        what: &'static str,
        index: usize,
        n: usize,
    },
}

/// The four effect-algebra axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// Commutativity of the partial sum.
    Ea1,
    /// Associativity, including matching definedness.
    Ea2,
    /// Existence and uniqueness of the orthosupplement.
    Ea3,
    /// `e ⊕ 1` is defined only for `e = 0`.
    Ea4,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Ea1 => "EA1",
            Axiom::Ea2 => "EA2",
            Axiom::Ea3 => "EA3",
            Axiom::Ea4 => "EA4",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<Elem>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

/// A partial binary operation on `{0, .., n-1}` with designated zero and unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteEffectAlgebra {
    n: usize,
    zero: Elem,
    one: Elem,
    sum: Vec<Option<Elem>>,
}

impl FiniteEffectAlgebra {
    pub fn from_rows(
        zero: Elem,
        one: Elem,
        rows: Vec<Vec<Option<Elem>>>,
    ) -> Result<Self, StructureError> {
        let n = rows.len();
        if n == 0 {
            return Err(StructureError::Empty);
        }
        for (what, index) in [("zero", zero), ("one", one)] {
            if index >= n {
                return Err(StructureError::OutOfRange { what, index, n });
            }
        }
        let mut sum = Vec::with_capacity(n * n);
        for (row, entries) in rows.into_iter().enumerate() {
            if entries.len() != n {
                return Err(StructureError::Ragged {
                    row,
                    len: entries.len(),
                    expected: n,
                });
            }
            for entry in entries {
                if let Some(index) = entry {
                    if index >= n {
                        return Err(StructureError::OutOfRange {
                            what: "sum entry",
                            index,
                            n,
                        });
                    }
                }
                sum.push(entry);
            }
        }
        Ok(Self { n, zero, one, sum })
    }

    /// Builds the table from a rule `(a, b) -> a ⊕ b`.
    pub fn from_fn(
        n: usize,
        zero: Elem,
        one: Elem,
        rule: impl Fn(Elem, Elem) -> Option<Elem>,
    ) -> Result<Self, StructureError> {
        let rows = (0..n).map(|a| (0..n).map(|b| rule(a, b)).collect()).collect();
        Self::from_rows(zero, one, rows)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn one(&self) -> Elem {
        self.one
    }

    pub fn sum(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.sum[a * self.n + b]
    }

    pub fn rows(&self) -> Vec<Vec<Option<Elem>>> {
        self.sum.chunks(self.n).map(<[_]>::to_vec).collect()
    }

    /// Copy of the table with one cell replaced.
    pub fn with_cell(&self, a: Elem, b: Elem, value: Option<Elem>) -> Self {
        let mut out = self.clone();
        out.sum[a * self.n + b] = value;
        out
    }
}

/// Checks EA1–EA4 exhaustively and returns every violation found.
pub fn validate_effect_algebra(table: &FiniteEffectAlgebra) -> ValidationReport {
    let n = table.len();
    let mut violations = Vec::new();

    for a in 0..n {
        for b in (a + 1)..n {
            if table.sum(a, b) != table.sum(b, a) {
                violations.push(Violation {
                    axiom: Axiom::Ea1,
                    witness: vec![a, b],
                });
            }
        }
    }

    for d in 0..n {
        for e in 0..n {
            for f in 0..n {
                let left = table.sum(d, e).and_then(|de| table.sum(de, f));
                let right = table.sum(e, f).and_then(|ef| table.sum(d, ef));
                if left != right {
                    violations.push(Violation {
                        axiom: Axiom::Ea2,
                        witness: vec![d, e, f],
                    });
                }
            }
        }
    }

    for e in 0..n {
        let complements: Vec<Elem> = (0..n)
            .filter(|&f| table.sum(e, f) == Some(table.one()))
            .collect();
        if complements.len() != 1 {
            let mut witness = vec![e];
            witness.extend(complements);
            violations.push(Violation {
                axiom: Axiom::Ea3,
                witness,
            });
        }
    }
    if table.sum(table.one(), table.zero()) != Some(table.one()) {
        violations.push(Violation {
            axiom: Axiom::Ea3,
            witness: vec![table.one(), table.zero()],
        });
    }

    for e in 0..n {
        if e != table.zero() && table.sum(e, table.one()).is_some() {
            violations.push(Violation {
                axiom: Axiom::Ea4,
                witness: vec![e, table.one()],
            });
        }
    }

    ValidationReport { violations }
}

/// Order, orthosupplement and difference derived from a valid table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedOrder {
    n: usize,
    leq: Vec<bool>,
    perp: Vec<Elem>,
    ominus: Vec<Option<Elem>>,
}

impl DerivedOrder {
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a * self.n + b]
    }

    pub fn perp(&self, a: Elem) -> Elem {
        self.perp[a]
    }

    /// `b ⊖ a`, defined iff `a ≤ b`.
    pub fn ominus(&self, b: Elem, a: Elem) -> Option<Elem> {
        self.ominus[b * self.n + a]
    }

    pub fn perps(&self) -> &[Elem] {
        &self.perp
    }
}

/// Derives `≤`, `⊥` and `⊖` from the table. The table is assumed valid;
/// on an invalid table the result is meaningless but well-formed.
pub fn derive_order(table: &FiniteEffectAlgebra) -> DerivedOrder {
    let n = table.len();
    let mut leq = vec![false; n * n];
    let mut ominus = vec![None; n * n];
    for a in 0..n {
        for c in 0..n {
            if let Some(b) = table.sum(a, c) {
                leq[a * n + b] = true;
                ominus[b * n + a].get_or_insert(c);
            }
        }
    }
    let perp = (0..n)
        .map(|a| {
            (0..n)
                .find(|&b| table.sum(a, b) == Some(table.one()))
                .unwrap_or(table.zero())
        })
        .collect();
    DerivedOrder {
        n,
        leq,
        perp,
        ominus,
    }
}

/// The validated algebra was rejected by [`validate_effect_algebra`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("table violates {} effect-algebra axiom instance(s)", .0.violations.len())]
pub struct InvalidAlgebra(pub ValidationReport);

/// A table that passed [`validate_effect_algebra`], with derived structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectAlgebra {
    table: FiniteEffectAlgebra,
    order: DerivedOrder,
    meet: Vec<Option<Elem>>,
    join: Vec<Option<Elem>>,
}

impl EffectAlgebra {
    pub fn new(table: FiniteEffectAlgebra) -> Result<Self, InvalidAlgebra> {
        let report = validate_effect_algebra(&table);
        if !report.is_valid() {
            return Err(InvalidAlgebra(report));
        }
        let order = derive_order(&table);
        let n = table.len();
        let mut meet = vec![None; n * n];
        let mut join = vec![None; n * n];
        for a in 0..n {
            for b in 0..n {
                meet[a * n + b] = extremal_bound(n, |x, y| order.leq(x, y), a, b);
                join[a * n + b] = extremal_bound(n, |x, y| order.leq(y, x), a, b);
            }
        }
        Ok(Self {
            table,
            order,
            meet,
            join,
        })
    }

    pub fn table(&self) -> &FiniteEffectAlgebra {
        &self.table
    }

    pub fn order(&self) -> &DerivedOrder {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn elements(&self) -> core::ops::Range<Elem> {
        0..self.len()
    }

    pub fn zero(&self) -> Elem {
        self.table.zero()
    }

    pub fn one(&self) -> Elem {
        self.table.one()
    }

    pub fn sum(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.table.sum(a, b)
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.order.leq(a, b)
    }

    pub fn perp(&self, a: Elem) -> Elem {
        self.order.perp(a)
    }

    pub fn ominus(&self, b: Elem, a: Elem) -> Option<Elem> {
        self.order.ominus(b, a)
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.meet[a * self.len() + b]
    }

    pub fn join(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.join[a * self.len() + b]
    }

    /// Every defined sum `(a, b, a ⊕ b)`.
    pub fn defined_sums(&self) -> impl Iterator<Item = (Elem, Elem, Elem)> + '_ {
        self.elements().flat_map(move |a| {
            self.elements()
                .filter_map(move |b| self.sum(a, b).map(|c| (a, b, c)))
        })
    }
}

// Greatest lower bound when `below(x, y)` is `x ≤ y`; least upper bound
// when it is the reversed order.
fn extremal_bound(
    n: usize,
    below: impl Fn(Elem, Elem) -> bool,
    a: Elem,
    b: Elem,
) -> Option<Elem> {
    let bounds: Vec<Elem> = (0..n).filter(|&c| below(c, a) && below(c, b)).collect();
    bounds
        .iter()
        .copied()
        .find(|&m| bounds.iter().all(|&c| below(c, m)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub is_lattice: bool,
    pub is_oml: bool,
    pub is_mv_effect_algebra: bool,
}

pub fn classify(algebra: &EffectAlgebra) -> Classification {
    let elems = || algebra.elements();
    let is_lattice = elems().all(|a| {
        elems().all(|b| algebra.meet(a, b).is_some() && algebra.join(a, b).is_some())
    });
    let zero = algebra.zero();
    let is_oml = is_lattice
        && elems().all(|a| {
            elems().all(|b| !algebra.leq(a, algebra.perp(b)) || algebra.meet(a, b) == Some(zero))
        });
    let is_mv_effect_algebra = is_lattice
        && elems().all(|a| {
            elems().all(|b| algebra.meet(a, b) != Some(zero) || algebra.leq(a, algebra.perp(b)))
        });
    Classification {
        is_lattice,
        is_oml,
        is_mv_effect_algebra,
    }
}

fn mask(n: usize, subset: &[Elem]) -> Option<Vec<bool>> {
    let mut m = vec![false; n];
    for &a in subset {
        *m.get_mut(a)? = true;
    }
    Some(m)
}

/// Downward closed, closed under defined sums, and containing zero.
pub fn is_ideal(algebra: &EffectAlgebra, subset: &[Elem]) -> bool {
    let Some(member) = mask(algebra.len(), subset) else {
        return false;
    };
    if !member[algebra.zero()] {
        return false;
    }
    let downward = algebra.elements().all(|a| {
        !member[a] || algebra.elements().all(|b| !algebra.leq(b, a) || member[b])
    });
    downward
        && algebra
            .defined_sums()
            .all(|(a, b, c)| !(member[a] && member[b]) || member[c])
}

/// Closed under orthosupplement and under sums defined in the ambient algebra.
pub fn is_subeffect_algebra(algebra: &EffectAlgebra, subset: &[Elem]) -> bool {
    let Some(member) = mask(algebra.len(), subset) else {
        return false;
    };
    algebra
        .elements()
        .all(|a| !member[a] || member[algebra.perp(a)])
        && algebra
            .defined_sums()
            .all(|(a, b, c)| !(member[a] && member[b]) || member[c])
}

/// `(a ∨ b) ⊖ (a ∧ b)`; `None` when the meet or join is missing.
pub fn symmetric_difference(algebra: &EffectAlgebra, a: Elem, b: Elem) -> Option<Elem> {
    let join = algebra.join(a, b)?;
    let meet = algebra.meet(a, b)?;
    algebra.ominus(join, meet)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuotientError {
    #[error("algebra is not an MV-effect algebra")]
    NotMv,
    #[error("subset is not an ideal")]
    NotIdeal,
    #[error("relation a~b iff aΔb ∈ I is not transitive at ({0}, {1}, {2})")]
    NotCongruence(Elem, Elem, Elem),
    #[error("class sum of [{0}] and [{1}] is not well defined")]
    SumNotWellDefined(Elem, Elem),
    #[error("quotient table is not an effect algebra: {0}")]
    Invalid(InvalidAlgebra),
}

/// `M|I` with its canonical projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub algebra: EffectAlgebra,
    /// Class index of every element of the source algebra.
    pub class_of: Vec<Elem>,
    /// Least source element of each class.
    pub representatives: Vec<Elem>,
}

impl Quotient {
    pub fn class(&self, a: Elem) -> Elem {
        self.class_of[a]
    }
}

/// Quotient of an MV-effect algebra by an ideal under `a ~ b iff aΔb ∈ I`.
/// Classes are numbered in order of their least element.
pub fn quotient_mv(algebra: &EffectAlgebra, ideal: &[Elem]) -> Result<Quotient, QuotientError> {
    if !classify(algebra).is_mv_effect_algebra {
        return Err(QuotientError::NotMv);
    }
    if !is_ideal(algebra, ideal) {
        return Err(QuotientError::NotIdeal);
    }
    let member = mask(algebra.len(), ideal).ok_or(QuotientError::NotIdeal)?;
    let related = |a: Elem, b: Elem| {
        symmetric_difference(algebra, a, b).is_some_and(|d| member[d])
    };

    let n = algebra.len();
    let mut class_of = vec![usize::MAX; n];
    let mut representatives = Vec::new();
    for a in 0..n {
        if class_of[a] != usize::MAX {
            continue;
        }
        let id = representatives.len();
        representatives.push(a);
        for b in a..n {
            if related(a, b) {
                if class_of[b] != usize::MAX {
                    return Err(QuotientError::NotCongruence(representatives[class_of[b]], b, a));
                }
                class_of[b] = id;
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if (class_of[a] == class_of[b]) != related(a, b) {
                return Err(QuotientError::NotCongruence(a, b, representatives[class_of[a]]));
            }
        }
    }

    let k = representatives.len();
    let mut sums: Vec<Option<Elem>> = vec![None; k * k];
    for (a, b, c) in algebra.defined_sums() {
        let cell = &mut sums[class_of[a] * k + class_of[b]];
        match *cell {
            None => *cell = Some(class_of[c]),
            Some(existing) if existing != class_of[c] => {
                return Err(QuotientError::SumNotWellDefined(
                    representatives[class_of[a]],
                    representatives[class_of[b]],
                ))
            }
            Some(_) => {}
        }
    }
    let rows = sums.chunks(k).map(<[_]>::to_vec).collect();
    let table = FiniteEffectAlgebra::from_rows(class_of[algebra.zero()], class_of[algebra.one()], rows)
        .expect("class indices are in range");
    let quotient = EffectAlgebra::new(table).map_err(QuotientError::Invalid)?;
    Ok(Quotient {
        algebra: quotient,
        class_of,
        representatives,
    })
}

/// Values of a candidate state, one per element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateVector {
    pub values: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateDefect {
    WrongLength { len: usize, expected: usize },
    OutOfRange(Elem),
    NotUnital,
    NotAdditive(Elem, Elem),
}

impl StateVector {
    pub fn new(values: Vec<Q>) -> Self {
        Self { values }
    }

    pub fn value(&self, a: Elem) -> &Q {
        &self.values[a]
    }

    /// First way in which this vector fails to be a state on `algebra`.
    pub fn defect(&self, algebra: &EffectAlgebra) -> Option<StateDefect> {
        if self.values.len() != algebra.len() {
            return Some(StateDefect::WrongLength {
                len: self.values.len(),
                expected: algebra.len(),
            });
        }
        if let Some(a) = algebra
            .elements()
            .find(|&a| !rational::in_unit_interval(&self.values[a]))
        {
            return Some(StateDefect::OutOfRange(a));
        }
        if !self.values[algebra.one()].is_one() {
            return Some(StateDefect::NotUnital);
        }
        algebra
            .defined_sums()
            .find(|&(a, b, c)| &self.values[a] + &self.values[b] != self.values[c])
            .map(|(a, b, _)| StateDefect::NotAdditive(a, b))
    }

    pub fn is_state_on(&self, algebra: &EffectAlgebra) -> bool {
        self.defect(algebra).is_none()
    }
}

/// Why the state polytope is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmptinessCertificate {
    /// `s(1) = 1` together with additivity has no real solution at all.
    InconsistentEquations,
    /// The equations are solvable but no basic solution is nonnegative;
    /// every one of `candidates` basic solutions was checked.
    NoNonnegativeVertex { candidates: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateSpace {
    Vertices(Vec<StateVector>),
    Empty(EmptinessCertificate),
}

impl StateSpace {
    pub fn vertices(&self) -> &[StateVector] {
        match self {
            StateSpace::Vertices(v) => v,
            StateSpace::Empty(_) => &[],
        }
    }
}

/// Vertices of `{s ≥ 0 : s(1) = 1, s(a ⊕ b) = s(a) + s(b)}` in exact
/// arithmetic, in lexicographic order. The bound `s ≤ 1` is implied by
/// `s(a) + s(a⊥) = 1`.
pub fn state_space(algebra: &EffectAlgebra) -> StateSpace {
    let n = algebra.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut unit = vec![Q::zero(); n];
    unit[algebra.one()] = Q::one();
    rows.push(unit);
    rhs.push(Q::one());
    let mut seen = BTreeSet::new();
    for (a, b, c) in algebra.defined_sums() {
        if !seen.insert((a.min(b), a.max(b))) {
            continue;
        }
        let mut row = vec![Q::zero(); n];
        row[a] += Q::one();
        row[b] += Q::one();
        row[c] -= Q::one();
        rows.push(row);
        rhs.push(Q::zero());
    }
    let Some(solution) = rational::solve_affine(&rows, &rhs, n) else {
        return StateSpace::Empty(EmptinessCertificate::InconsistentEquations);
    };
    let k = solution.directions.len();
    let value_at = |t: &[Q]| -> Vec<Q> {
        (0..n)
            .map(|i| {
                let mut v = solution.particular[i].clone();
                for (dir, ti) in solution.directions.iter().zip(t) {
                    v += &dir[i] * ti;
                }
                v
            })
            .collect()
    };

    // Coordinates whose value actually depends on the parameters.
    let active: Vec<usize> = (0..n)
        .filter(|&i| solution.directions.iter().any(|d| !d[i].is_zero()))
        .collect();
    let mut vertices = BTreeSet::new();
    let mut candidates = 0;
    for subset in combinations(active.len(), k) {
        candidates += 1;
        let coords: Vec<usize> = subset.iter().map(|&j| active[j]).collect();
        let system: Vec<Vec<Q>> = coords
            .iter()
            .map(|&i| solution.directions.iter().map(|d| d[i].clone()).collect())
            .collect();
        let target: Vec<Q> = coords.iter().map(|&i| -solution.particular[i].clone()).collect();
        let Some(t) = rational::solve_square(&system, &target) else {
            continue;
        };
        let values = value_at(&t);
        if values.iter().all(|v| !v.is_negative()) {
            vertices.insert(StateVector { values });
        }
    }
    if vertices.is_empty() {
        StateSpace::Empty(EmptinessCertificate::NoNonnegativeVertex { candidates })
    } else {
        StateSpace::Vertices(vertices.into_iter().collect())
    }
}

// All k-subsets of 0..n in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// A pair `(e, f)` with `ω(e) ≤ ω(f)` for every supplied state but `e ≰ f`.
pub fn ordering_witness(algebra: &EffectAlgebra, states: &[StateVector]) -> Option<(Elem, Elem)> {
    algebra.elements().find_map(|e| {
        algebra.elements().find_map(|f| {
            let dominated = states.iter().all(|s| s.values[e] <= s.values[f]);
            (dominated && !algebra.leq(e, f)).then_some((e, f))
        })
    })
}

pub fn is_ordering_set(algebra: &EffectAlgebra, states: &[StateVector]) -> bool {
    ordering_witness(algebra, states).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;

    #[test]
    fn fixtures_are_valid() {
        for table in [
            fixtures::chain_table(1),
            fixtures::chain_table(2),
            fixtures::diamond_table(),
            fixtures::mo2_table(),
        ] {
            assert!(validate_effect_algebra(&table).is_valid(), "{table:?}");
        }
    }

    #[test]
    fn ea4_mutation_reports_witness() {
        let table = fixtures::chain_table(2).with_cell(1, 2, Some(2));
        let report = validate_effect_algebra(&table);
        assert!(report
            .violations
            .contains(&Violation { axiom: Axiom::Ea4, witness: vec![1, 2] }));
    }

    #[test]
    fn structural_errors_are_distinct() {
        assert_eq!(
            FiniteEffectAlgebra::from_rows(0, 1, vec![vec![Some(0), Some(1)], vec![Some(1)]]),
            Err(StructureError::Ragged { row: 1, len: 1, expected: 2 })
        );
        assert!(matches!(
            FiniteEffectAlgebra::from_rows(0, 1, vec![vec![Some(0), Some(5)], vec![Some(1), None]]),
            Err(StructureError::OutOfRange { index: 5, .. })
        ));
        assert_eq!(FiniteEffectAlgebra::from_rows(0, 0, vec![]), Err(StructureError::Empty));
    }

    #[test]
    fn derived_order_of_chain_and_diamond() {
        let chain = fixtures::chain3();
        assert!(chain.leq(0, 1) && chain.leq(1, 2) && chain.leq(0, 2));
        assert_eq!(chain.perp(1), 1);
        let diamond = fixtures::diamond();
        assert!(!diamond.leq(1, 2) && !diamond.leq(2, 1));
        assert_eq!(diamond.perp(1), 2);
        assert_eq!(diamond.perp(diamond.zero()), diamond.one());
        assert_eq!(diamond.ominus(3, 1), Some(2));
        assert_eq!(diamond.ominus(1, 2), None);
    }

    #[test]
    fn classification_examples() {
        let mo2 = classify(&fixtures::mo2());
        assert!(mo2.is_lattice && mo2.is_oml && !mo2.is_mv_effect_algebra);
        let diamond = classify(&fixtures::diamond());
        assert!(diamond.is_mv_effect_algebra && diamond.is_oml);
        assert!(classify(&fixtures::chain3()).is_mv_effect_algebra);
        assert!(!classify(&fixtures::chain3()).is_oml);
    }

    #[test]
    fn ideals() {
        let diamond = fixtures::diamond();
        assert!(is_ideal(&diamond, &[0]));
        assert!(is_ideal(&diamond, &[0, 1]));
        assert!(!is_ideal(&diamond, &[1]));
        assert!(!is_ideal(&fixtures::chain3(), &[0, 1]));
        assert!(!is_ideal(&diamond, &[0, 9]));
    }

    #[test]
    fn quotients() {
        let diamond = fixtures::diamond();
        let q = quotient_mv(&diamond, &[0, 1]).unwrap();
        assert_eq!(q.algebra.len(), 2);
        assert_eq!(q.class_of, vec![0, 0, 1, 1]);
        let trivial = quotient_mv(&diamond, &[0]).unwrap();
        assert_eq!(trivial.class_of, vec![0, 1, 2, 3]);
        assert_eq!(trivial.algebra.table(), diamond.table());
        assert_eq!(quotient_mv(&fixtures::mo2(), &[0]), Err(QuotientError::NotMv));
        assert_eq!(quotient_mv(&diamond, &[1]), Err(QuotientError::NotIdeal));
    }

    #[test]
    fn state_spaces() {
        let chain = state_space(&fixtures::chain3());
        assert_eq!(chain.vertices(), &[StateVector::new(vec![q(0, 1), q(1, 2), q(1, 1)])]);
        let two = state_space(&fixtures::chain2());
        assert_eq!(two.vertices(), &[StateVector::new(vec![q(0, 1), q(1, 1)])]);
        let diamond = state_space(&fixtures::diamond());
        assert_eq!(
            diamond.vertices(),
            &[
                StateVector::new(vec![q(0, 1), q(0, 1), q(1, 1), q(1, 1)]),
                StateVector::new(vec![q(0, 1), q(1, 1), q(0, 1), q(1, 1)]),
            ]
        );
    }

    #[test]
    fn stateless_algebra_reports_emptiness() {
        // With 0 = 1, additivity forces s(1) = s(0) = 0.
        let trivial = EffectAlgebra::new(
            FiniteEffectAlgebra::from_rows(0, 0, vec![vec![Some(0)]]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            state_space(&trivial),
            StateSpace::Empty(EmptinessCertificate::InconsistentEquations)
        );
    }

    #[test]
    fn ordering_sets() {
        let diamond = fixtures::diamond();
        let state = |t: Q| StateVector::new(vec![q(0, 1), t.clone(), q(1, 1) - t, q(1, 1)]);
        assert!(is_ordering_set(&diamond, &[state(q(1, 3)), state(q(2, 3))]));
        assert_eq!(ordering_witness(&diamond, &[state(q(1, 2))]), Some((1, 2)));
        let chain = fixtures::chain3();
        assert!(is_ordering_set(&chain, state_space(&chain).vertices()));
    }
}
