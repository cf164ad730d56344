//! The full battery of property checks run by `stateop suite`.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use stateop_core::commutative::{
    check_mv_conditional_expectation, is_ce_commutative, is_strong_commutative, mv_ce_from_strong_operator,
    quotient_strong_operator, random_fuzzy, random_partition, random_prob_space, random_stochastic_idempotent,
    BlockPartition, FiniteProbSpace, FuzzyEventVector, StochasticIdempotent,
};
use stateop_core::effect::{
    classify, is_ordering_set, is_subeffect_algebra, state_space, validate_effect_algebra, EffectAlgebra, Elem,
    FiniteEffectAlgebra, Violation,
};
use stateop_core::fixtures;
use stateop_core::jc::random::{self as jr, JcRng};
use stateop_core::jc::{
    ce_residual, check_state_operator, decompose, distance, equivalence_lemma_check, faithfulness_gap,
    is_conditional_expectation, is_faithful, kadison_schwarz_check, luders_operator, second_lemma_check,
    vector_state_operator, CMatrix, HermitianEffect, HermitianMap, Pvm, Tolerances, C,
};
use stateop_core::mv::{validate_mv, MvAlgebra, MvViolation};
use stateop_core::rational::{q, Q};
use stateop_core::state_ops::{
    enumerate_state_operators, induced_state, quotient_state_operator, validate_state_operator, ElementMap,
};

use crate::commands::qs_json;
use crate::input::{self, Source};
use crate::report::{SuiteReport, Status, TheoremResult, ToleranceReport};

/// Largest fixture size enumerated by the suite.
pub const ENUMERATION_BOUND: usize = 9;
/// Invalid single-cell mutations examined per fixture.
pub const MUTATIONS_PER_FIXTURE: usize = 100;
/// Random instances for the matrix-model and probability-space checks.
pub const RANDOM_INSTANCES: usize = 1000;
/// Random block maps decomposed.
pub const BLOCK_MAPS: usize = 100;
/// Residual allowed for the matrix-model checks.
pub const MATRIX_EPS: f64 = 1e-8;
const MAX_WITNESSES: usize = 5;

pub const DETERMINISM: &str = "suite-determinism";

type Check = fn(u64, &Tolerances) -> Tally;

/// Every check, in report order.
pub const CHECKS: [(&str, Check); 12] = [
    ("axiom-gate", axiom_gate),
    ("clause-agreement", clause_agreement),
    ("decomposition", decomposition),
    ("faithful-implies-strong", faithful_implies_strong),
    ("induced-state", induced_states),
    ("kadison-schwarz", kadison_schwarz),
    ("luders-operator", luders_operator_check),
    ("mv-conditional-expectation", mv_conditional_expectation_check),
    ("quotient-faithful", quotient_faithful),
    ("quotient-strong-operator", quotient_strong_check),
    ("state-operator-consequences", state_operator_consequences),
    ("strong-equals-ce", strong_equals_ce),
];

/// Names of all entries of a suite report, sorted.
pub fn names() -> Vec<&'static str> {
    let mut names: Vec<&str> = CHECKS.iter().map(|(n, _)| *n).chain([DETERMINISM]).collect();
    names.sort_unstable();
    names
}

#[derive(Default)]
pub struct Tally {
    checked: u64,
    failures: u64,
    witnesses: Vec<Value>,
    details: Map<String, Value>,
}

impl Tally {
    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    fn detail(&mut self, key: &str, value: impl Into<Value>) {
        self.details.insert(key.to_owned(), value.into());
    }

    fn finish(mut self, name: &str, elapsed_ms: u128) -> TheoremResult {
        self.detail("failures", self.failures);
        TheoremResult {
            name: name.to_owned(),
            status: Status::from_bool(self.failures == 0 && self.checked > 0),
            checked: self.checked,
            witnesses: self.witnesses,
            details: Value::Object(self.details),
            elapsed_ms,
        }
    }
}

fn sub_seed(seed: u64, salt: u64) -> u64 {
    seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn sub_rng(seed: u64, salt: u64) -> JcRng {
    jr::rng(sub_seed(seed, salt))
}

/// Runs one check by name.
pub fn check(name: &str, seed: u64, tol: &Tolerances) -> Option<TheoremResult> {
    let (name, f) = CHECKS.iter().find(|(n, _)| *n == name)?;
    let start = Instant::now();
    let tally = f(seed, tol);
    Some(tally.finish(name, start.elapsed().as_millis()))
}

fn run_checks(seed: u64, tol: &Tolerances) -> Vec<TheoremResult> {
    CHECKS
        .par_iter()
        .map(|(name, _)| check(name, seed, tol).expect("listed check"))
        .collect()
}

pub fn run(seed: u64, tol: &Tolerances) -> SuiteReport {
    let start = Instant::now();
    let mut theorems = run_checks(seed, tol);
    let first = start.elapsed().as_millis();
    let again = run_checks(seed, tol);
    let serialize = |t: &[TheoremResult]| serde_json::to_string(t).expect("reports serialize");
    let mut tally = Tally::default();
    for (a, b) in theorems.iter().zip(&again) {
        let same = serde_json::to_string(a).ok() == serde_json::to_string(b).ok();
        tally.record(same, || json!({"check": a.name}));
    }
    tally.record(serialize(&theorems) == serialize(&again), || json!({"check": "all"}));
    theorems.push(tally.finish(DETERMINISM, start.elapsed().as_millis() - first));
    theorems.sort_by(|a, b| a.name.cmp(&b.name));
    SuiteReport {
        command: "suite".to_owned(),
        status: Status::from_bool(theorems.iter().all(|t| t.status == Status::Pass)),
        seed,
        tolerances: ToleranceReport::from(tol),
        theorems,
    }
}

// Axiom gate.

fn effect_oracle_valid(t: &FiniteEffectAlgebra) -> bool {
    let n = t.len();
    let (zero, one) = (t.zero(), t.one());
    let commutative = (0..n).all(|a| (0..n).all(|b| t.sum(a, b) == t.sum(b, a)));
    let associative = (0..n).all(|a| {
        (0..n).all(|b| {
            (0..n).all(|c| match t.sum(b, c).and_then(|bc| t.sum(a, bc)) {
                Some(right) => t.sum(a, b).and_then(|ab| t.sum(ab, c)) == Some(right),
                None => true,
            })
        })
    });
    let supplements = (0..n).all(|a| (0..n).filter(|&b| t.sum(a, b) == Some(one)).count() == 1)
        && (0..n).find(|&b| t.sum(one, b) == Some(one)) == Some(zero);
    let zero_one = (0..n).all(|a| t.sum(a, one).is_none() || a == zero);
    commutative && associative && supplements && zero_one
}

fn effect_witness_confirmed(t: &FiniteEffectAlgebra, v: &Violation) -> bool {
    let w = &v.witness;
    let n = t.len();
    match (v.axiom.name(), w.as_slice()) {
        ("EA1", &[a, b]) => t.sum(a, b) != t.sum(b, a),
        ("EA2", &[a, b, c]) => {
            t.sum(a, b).and_then(|ab| t.sum(ab, c)) != t.sum(b, c).and_then(|bc| t.sum(a, bc))
        }
        ("EA3", [e, rest @ ..]) => {
            let complements: Vec<Elem> = (0..n).filter(|&f| t.sum(*e, f) == Some(t.one())).collect();
            (complements.len() != 1 && complements == rest)
                || (*e == t.one() && rest == [t.zero()] && t.sum(t.one(), t.zero()) != Some(t.one()))
        }
        ("EA4", &[e, one]) => one == t.one() && e != t.zero() && t.sum(e, one).is_some(),
        _ => false,
    }
}

fn mv_oracle_valid(m: &MvAlgebra) -> bool {
    let n = m.len();
    let one = m.neg(m.zero());
    let p = |a, b| m.plus(a, b);
    let elems = || 0..n;
    elems().all(|x| {
        p(x, m.zero()) == x
            && m.neg(m.neg(x)) == x
            && p(x, one) == one
            && elems().all(|y| {
                p(x, y) == p(y, x)
                    && p(m.neg(p(m.neg(x), y)), y) == p(m.neg(p(m.neg(y), x)), x)
                    && elems().all(|z| p(p(x, y), z) == p(x, p(y, z)))
            })
    })
}

fn mv_witness_confirmed(m: &MvAlgebra, v: &MvViolation) -> bool {
    let one = m.neg(m.zero());
    let p = |a, b| m.plus(a, b);
    match (v.identity.name(), v.witness.as_slice()) {
        ("ZERO", &[x]) => p(x, m.zero()) != x,
        ("INVOLUTION", &[x]) => m.neg(m.neg(x)) != x,
        ("ABSORB", &[x]) => p(x, one) != one,
        ("COMM", &[x, y]) => p(x, y) != p(y, x),
        ("LUKASIEWICZ", &[x, y]) => p(x, m.neg(p(x, m.neg(y)))) != p(y, m.neg(p(y, m.neg(x)))),
        ("ASSOC", &[x, y, z]) => p(p(x, y), z) != p(x, p(y, z)),
        _ => false,
    }
}

fn effect_mutations(t: &FiniteEffectAlgebra) -> Vec<(Elem, Elem, Option<Elem>)> {
    let n = t.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for v in std::iter::once(None).chain((0..n).map(Some)) {
                if v != t.sum(a, b) {
                    out.push((a, b, v));
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy)]
enum MvMutation {
    Plus(Elem, Elem, Elem),
    Neg(Elem, Elem),
}

fn mv_mutations(m: &MvAlgebra) -> Vec<MvMutation> {
    let n = m.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            out.extend((0..n).filter(|&v| v != m.plus(a, b)).map(|v| MvMutation::Plus(a, b, v)));
        }
        out.extend((0..n).filter(|&v| v != m.neg(a)).map(|v| MvMutation::Neg(a, v)));
    }
    out
}

fn axiom_gate(seed: u64, _: &Tolerances) -> Tally {
    let mut tally = Tally::default();
    let mut rng = sub_rng(seed, 1);
    let mut per_fixture = Map::new();
    let effect_tables = [
        ("chain2", fixtures::chain_table(1)),
        ("chain3", fixtures::chain_table(2)),
        ("diamond", fixtures::diamond_table()),
        ("mo2", fixtures::mo2_table()),
    ];
    for (name, table) in &effect_tables {
        tally.record(validate_effect_algebra(table).is_valid() && effect_oracle_valid(table), || {
            json!({"fixture": name, "problem": "bundled table rejected"})
        });
        let mut mutations = effect_mutations(table);
        mutations.shuffle(&mut rng);
        let (mut rejected, mut accepted) = (0usize, 0usize);
        for (a, b, v) in mutations {
            if rejected == MUTATIONS_PER_FIXTURE {
                break;
            }
            let mutated = table.with_cell(a, b, v);
            let report = validate_effect_algebra(&mutated);
            if effect_oracle_valid(&mutated) {
                accepted += 1;
                tally.record(report.is_valid(), || json!({"fixture": name, "cell": [a, b], "value": v, "problem": "valid mutation rejected"}));
                continue;
            }
            rejected += 1;
            let ok = !report.is_valid() && report.violations.iter().all(|w| effect_witness_confirmed(&mutated, w));
            tally.record(ok, || json!({"fixture": name, "cell": [a, b], "value": v}));
        }
        per_fixture.insert(name.to_string(), json!({"rejected": rejected, "valid_mutations": accepted}));
    }
    let mv_tables = [("luk3", fixtures::luk3()), ("luk3xluk3", fixtures::luk3_squared())];
    for (name, m) in &mv_tables {
        tally.record(validate_mv(m).is_valid() && mv_oracle_valid(m), || {
            json!({"fixture": name, "problem": "bundled table rejected"})
        });
        let mut mutations = mv_mutations(m);
        mutations.shuffle(&mut rng);
        let (mut rejected, mut accepted) = (0usize, 0usize);
        for mutation in mutations {
            if rejected == MUTATIONS_PER_FIXTURE {
                break;
            }
            let (mutated, cell) = match mutation {
                MvMutation::Plus(a, b, v) => (m.with_plus(a, b, v), json!({"boxplus": [a, b], "value": v})),
                MvMutation::Neg(a, v) => (m.with_neg(a, v), json!({"neg": a, "value": v})),
            };
            let report = validate_mv(&mutated);
            if mv_oracle_valid(&mutated) {
                accepted += 1;
                tally.record(report.is_valid(), || json!({"fixture": name, "mutation": cell, "problem": "valid mutation rejected"}));
                continue;
            }
            rejected += 1;
            let ok = !report.is_valid() && report.violations.iter().all(|w| mv_witness_confirmed(&mutated, w));
            tally.record(ok, || json!({"fixture": name, "mutation": cell}));
        }
        per_fixture.insert(name.to_string(), json!({"rejected": rejected, "valid_mutations": accepted}));
    }
    tally.detail("fixtures", Value::Object(per_fixture));
    tally
}

// State operators on the bundled algebras.

struct Enumerated {
    name: &'static str,
    algebra: EffectAlgebra,
    operators: Vec<ElementMap>,
}

fn enumerated() -> Vec<Enumerated> {
    fixtures::all()
        .into_iter()
        .filter(|f| f.algebra.len() <= ENUMERATION_BOUND)
        .map(|f| Enumerated {
            name: f.name,
            operators: enumerate_state_operators(&f.algebra, ENUMERATION_BOUND).expect("within bound"),
            algebra: f.algebra,
        })
        .collect()
}

/// Brute force over all maps with `τ(0) = 0` and `τ(1) = 1`.
fn brute_force_operators(algebra: &EffectAlgebra) -> BTreeSet<Vec<Elem>> {
    let n = algebra.len();
    let free: Vec<Elem> = algebra.elements().filter(|&a| a != algebra.zero() && a != algebra.one()).collect();
    let mut found = BTreeSet::new();
    let total = n.pow(free.len() as u32);
    for code in 0..total {
        let mut images = vec![0; n];
        images[algebra.one()] = algebra.one();
        images[algebra.zero()] = algebra.zero();
        let mut c = code;
        for &a in &free {
            images[a] = c % n;
            c /= n;
        }
        let tau = ElementMap(images);
        if validate_state_operator(algebra, &tau).is_state_operator {
            found.insert(tau.0);
        }
    }
    found
}

fn consequences_hold(algebra: &EffectAlgebra, tau: &ElementMap) -> bool {
    let t = |a| tau.apply(a);
    let elems = || algebra.elements();
    let zero = t(algebra.zero()) == algebra.zero();
    let perp = elems().all(|a| t(algebra.perp(a)) == algebra.perp(t(a)));
    let monotone = elems().all(|a| {
        elems().all(|b| {
            !algebra.leq(a, b)
                || (algebra.leq(t(a), t(b))
                    && algebra.ominus(b, a).map(t) == algebra.ominus(t(b), t(a)))
        })
    });
    let range: Vec<Elem> = elems().filter(|&a| t(a) == a).collect();
    let image: BTreeSet<Elem> = elems().map(t).collect();
    zero && perp && monotone && image == range.iter().copied().collect() && is_subeffect_algebra(algebra, &range)
}

fn state_operator_consequences(_: u64, _: &Tolerances) -> Tally {
    let mut tally = Tally::default();
    let mut counts = Map::new();
    for e in enumerated() {
        counts.insert(e.name.to_owned(), json!(e.operators.len()));
        if e.algebra.len() <= 6 {
            let brute = brute_force_operators(&e.algebra);
            let listed: BTreeSet<Vec<Elem>> = e.operators.iter().map(|t| t.0.clone()).collect();
            tally.record(brute == listed, || json!({"fixture": e.name, "problem": "enumeration differs from brute force"}));
        }
        for tau in &e.operators {
            let report = validate_state_operator(&e.algebra, tau);
            let ok = report.is_state_operator && report.consequences.is_empty() && consequences_hold(&e.algebra, tau);
            tally.record(ok, || json!({"fixture": e.name, "tau": tau.images()}));
        }
    }
    tally.detail("operators", Value::Object(counts));
    tally
}

fn faithful_implies_strong(_: u64, _: &Tolerances) -> Tally {
    let mut tally = Tally::default();
    let (mut faithful, mut strong) = (0u64, 0u64);
    for e in enumerated() {
        for tau in &e.operators {
            let a = &e.algebra;
            let is_faithful = a.elements().all(|x| tau.apply(x) != a.zero() || x == a.zero());
            let is_strong = a.elements().all(|x| {
                a.elements().all(|y| match a.meet(tau.apply(x), tau.apply(y)) {
                    Some(m) => tau.apply(m) == m,
                    None => true,
                })
            });
            let report = validate_state_operator(a, tau);
            faithful += is_faithful as u64;
            strong += is_strong as u64;
            let ok = report.is_faithful == Some(is_faithful)
                && report.is_strong == Some(is_strong)
                && (!is_faithful || is_strong);
            tally.record(ok, || json!({"fixture": e.name, "tau": tau.images()}));
        }
    }
    tally.detail("faithful", faithful);
    tally.detail("strong", strong);
    tally
}

fn quotient_faithful(_: u64, _: &Tolerances) -> Tally {
    let mut tally = Tally::default();
    let mut sizes = Map::new();
    for e in enumerated().into_iter().filter(|e| classify(&e.algebra).is_mv_effect_algebra) {
        let mut classes = Vec::new();
        for tau in &e.operators {
            match quotient_state_operator(&e.algebra, tau) {
                Ok(out) => {
                    let report = validate_state_operator(&out.quotient.algebra, &out.tau_hat);
                    classes.push(out.quotient.algebra.len());
                    tally.record(report.is_state_operator && report.is_faithful == Some(true), || {
                        json!({"fixture": e.name, "tau": tau.images()})
                    });
                }
                Err(err) => tally.record(false, || json!({"fixture": e.name, "tau": tau.images(), "error": err.to_string()})),
            }
        }
        sizes.insert(e.name.to_owned(), json!(classes));
    }
    let diamond = fixtures::diamond();
    let collapse = quotient_state_operator(&diamond, &ElementMap(vec![0, 0, 3, 3]));
    let example = collapse
        .as_ref()
        .is_ok_and(|out| out.quotient.algebra.len() == 2 && out.tau_hat == ElementMap::identity(2));
    tally.record(example, || json!({"example": "diamond collapse"}));
    let luk = fixtures::luk3_squared_effect();
    let diagonal = ElementMap((0..9).map(|a| 3 * (a / 3) + a / 3).collect());
    let example = quotient_state_operator(&luk, &diagonal)
        .is_ok_and(|out| out.quotient.algebra.len() == 3 && validate_state_operator(&luk, &diagonal).kernel == [0, 1, 2]);
    tally.record(example, || json!({"example": "product diagonal"}));
    tally.detail("quotient_sizes", Value::Object(sizes));
    tally
}

fn induced_states(_: u64, _: &Tolerances) -> Tally {
    let mut tally = Tally::default();
    let mut skipped = Vec::new();
    for e in enumerated() {
        let space = state_space(&e.algebra);
        let vertices = space.vertices();
        if vertices.is_empty() || !is_ordering_set(&e.algebra, vertices) {
            skipped.push(e.name);
            continue;
        }
        for tau in &e.operators {
            for omega in vertices {
                let ok = match induced_state(&e.algebra, tau, omega, vertices) {
                    Ok(s) => {
                        s.is_state_on(&e.algebra)
                            && e.algebra.elements().all(|a| s.values[a] == omega.values[tau.apply(a)])
                    }
                    Err(_) => false,
                };
                tally.record(ok, || json!({"fixture": e.name, "tau": tau.images(), "omega": qs_json(&omega.values)}));
            }
        }
    }
    tally.detail("skipped_fixtures", json!(skipped));
    tally
}

// Matrix model.

/// Random PVM, effect and second effect, the family shared by the
/// Kadison–Schwarz and Lüders checks.
fn luders_family(seed: u64) -> impl Iterator<Item = (Pvm, CMatrix, CMatrix)> {
    let mut rng = sub_rng(seed, 6);
    (0..RANDOM_INSTANCES).map(move |_| {
        let d = rng.random_range(1..=6);
        let blocks = rng.random_range(1..=d);
        let pvm = jr::random_pvm(d, blocks, &mut rng);
        let a = jr::random_effect(d, &mut rng);
        let b = jr::random_effect(d, &mut rng);
        (pvm, a, b)
    })
}

fn kadison_schwarz(seed: u64, tol: &Tolerances) -> Tally {
    let mut tally = Tally::default();
    let mut worst = f64::INFINITY;
    for (i, (pvm, a, _)) in luders_family(seed).enumerate() {
        let m = luders_operator(&pvm);
        let ok = match HermitianEffect::new(a, tol).and_then(|a| kadison_schwarz_check(&m, &a)) {
            Ok(gaps) => {
                worst = worst.min(gaps.lhs_gap).min(gaps.rhs_gap);
                gaps.holds(tol)
            }
            Err(_) => false,
        };
        tally.record(ok, || json!({"instance": i, "dim": pvm.dim()}));
    }
    tally.detail("smallest_gap", worst);
    tally
}

fn luders_operator_check(seed: u64, tol: &Tolerances) -> Tally {
    let mut tally = Tally::default();
    let mut worst = [0.0f64; 4];
    for (i, (pvm, a, b)) in luders_family(seed).enumerate() {
        let m = luders_operator(&pvm);
        let idempotence = m.compose(&m).distance(&m);
        let ce = ce_residual(&m, &a, &b);
        let ta = m.apply(&a);
        let trace_gap = (ta.trace() - a.trace()).norm();
        let faithful = is_faithful(&m, tol) && trace_gap <= MATRIX_EPS;
        let image_defect = pvm.commutant_defect(&ta);
        let image_fixed = distance(&m.apply(&ta), &ta);
        let commutes = pvm.commutant_defect(&a) <= MATRIX_EPS;
        let fixed = distance(&ta, &a) <= MATRIX_EPS;
        worst[0] = worst[0].max(idempotence);
        worst[1] = worst[1].max(ce);
        worst[2] = worst[2].max(image_defect);
        worst[3] = worst[3].max(image_fixed);
        let ok = idempotence <= MATRIX_EPS
            && ce <= MATRIX_EPS
            && faithful
            && image_defect <= MATRIX_EPS
            && image_fixed <= MATRIX_EPS
            && commutes == fixed;
        tally.record(ok, || json!({"instance": i, "dim": pvm.dim(), "faithfulness_gap": faithfulness_gap(&m)}));
    }
    tally.detail("idempotence_residual", worst[0]);
    tally.detail("ce_residual", worst[1]);
    tally.detail("range_commutant_defect", worst[2]);
    tally.detail("range_fixed_residual", worst[3]);
    tally
}

/// Random map (Lüders or block map) with an element of its multiplicative
/// domain and an element of its range.
struct LemmaInstance {
    map: HermitianMap,
    domain_element: CMatrix,
    random: CMatrix,
}

fn lemma_instance(i: usize, rng: &mut JcRng) -> LemmaInstance {
    let d = rng.random_range(2..=4);
    let h = jr::random_effect(d, rng);
    let random = jr::random_effect(d, rng);
    if i.is_multiple_of(2) {
        let pvm = jr::random_pvm(d, rng.random_range(1..=d), rng);
        let map = luders_operator(&pvm);
        let domain_element = map.apply(&h);
        return LemmaInstance {
            map,
            domain_element,
            random,
        };
    }
    let spec = jr::random_block_map(d, rng);
    let mut domain_element = CMatrix::zeros(d, d);
    for p in &spec.pinched {
        domain_element += p * &h * p;
    }
    for (q, _) in &spec.collapsed {
        domain_element += q.scale(rng.random::<f64>());
    }
    LemmaInstance {
        map: spec.map(),
        domain_element,
        random,
    }
}

fn clause_agreement(seed: u64, tol: &Tolerances) -> Tally {
    let mut tally = Tally::default();
    let mut rng = sub_rng(seed, 8);
    let mut outcomes = [[0u64; 2]; 2];
    for i in 0..RANDOM_INSTANCES {
        let inst = lemma_instance(i, &mut rng);
        let structured = i % 4 < 2;
        let a = if structured { &inst.domain_element } else { &inst.random };
        match equivalence_lemma_check(&inst.map, a, tol) {
            Ok(c) => {
                outcomes[0][c.a as usize] += 1;
                tally.record(c.agree() && (!structured || c.a), || {
                    json!({"lemma": "multiplicative-domain", "instance": i, "residuals": c.residuals})
                });
            }
            Err(e) => tally.record(false, || json!({"lemma": "multiplicative-domain", "instance": i, "error": e.to_string()})),
        }
        let a = if structured { inst.map.apply(&inst.random) } else { inst.random.clone() };
        match second_lemma_check(&inst.map, &a, tol) {
            Ok(c) => {
                outcomes[1][c.a as usize] += 1;
                tally.record(c.agree() && (!structured || c.a), || {
                    json!({"lemma": "range", "instance": i, "residuals": c.residuals})
                });
            }
            Err(e) => tally.record(false, || json!({"lemma": "range", "instance": i, "error": e.to_string()})),
        }
    }
    tally.detail("multiplicative_domain", json!({"all_false": outcomes[0][0], "all_true": outcomes[0][1]}));
    tally.detail("range", json!({"all_false": outcomes[1][0], "all_true": outcomes[1][1]}));
    tally
}

fn diagonal_pinching(d: usize) -> HermitianMap {
    let projections = (0..d)
        .map(|i| CMatrix::from_fn(d, d, |r, c| C::new((r == i && c == i) as u8 as f64, 0.0)))
        .collect();
    luders_operator(&Pvm::new(projections, &Tolerances::default()).expect("coordinate projections"))
}

fn decomposition(seed: u64, tol: &Tolerances) -> Tally {
    let mut tally = Tally::default();
    let e0 = nalgebra::DVector::from_vec(vec![C::new(1.0, 0.0), C::new(0.0, 0.0)]);
    let corner = vector_state_operator(&e0);
    let ok = decompose(&corner, tol, seed).is_ok_and(|dec| {
        dec.mu.distance(&diagonal_pinching(2)) <= MATRIX_EPS && dec.composition_residual <= MATRIX_EPS
    });
    tally.record(ok, || json!({"example": "corner"}));
    let mut rng = sub_rng(seed, 9);
    let mut worst = [0.0f64; 3];
    for i in 0..BLOCK_MAPS {
        let d = rng.random_range(2..=4);
        let spec = jr::random_block_map(d, &mut rng);
        let m = spec.map();
        let sub = sub_seed(seed, 100 + i as u64);
        let ok = match decompose(&m, tol, sub) {
            Ok(dec) => {
                let support_gap = distance(&dec.support, &spec.expected_support());
                worst[0] = worst[0].max(dec.range_residual);
                worst[1] = worst[1].max(dec.composition_residual);
                worst[2] = worst[2].max(support_gap);
                check_state_operator(&dec.mu, tol, sub).is_state_operator()
                    && is_faithful(&dec.mu, tol)
                    && is_conditional_expectation(&dec.mu, tol, sub).is_ok_and(|c| c.holds)
                    && dec.range_residual <= MATRIX_EPS
                    && dec.composition_residual <= MATRIX_EPS
                    && support_gap <= MATRIX_EPS
            }
            Err(_) => false,
        };
        tally.record(ok, || json!({"instance": i, "dim": d}));
    }
    tally.detail("range_residual", worst[0]);
    tally.detail("composition_residual", worst[1]);
    tally.detail("support_residual", worst[2]);
    tally
}

// Commutative model.

fn bundled_stochastic(name: &str) -> StochasticIdempotent {
    let source = Source::parse(name, input::bundled(name).expect("bundled file")).expect("bundled JSON");
    input::stochastic(&source).expect("bundled matrix")
}

pub const BUNDLED_STOCHASTIC: [&str; 4] = [
    "blocks4.stochastic.json",
    "collapse2.stochastic.json",
    "counterexample3.stochastic.json",
    "identity3.stochastic.json",
];

fn strong_equals_ce(seed: u64, _: &Tolerances) -> Tally {
    let mut tally = Tally::default();
    let mut rng = sub_rng(seed, 10);
    let mut strong_count = 0u64;
    let mut compare = |tally: &mut Tally, t: &StochasticIdempotent, label: Value, sub: u64| {
        match (is_strong_commutative(t, sub), is_ce_commutative(t, sub)) {
            (Ok(s), Ok(c)) => {
                strong_count += s.holds as u64;
                tally.record(s.holds == c.holds, || json!({"operator": label, "strong": s.holds, "ce": c.holds}));
            }
            _ => tally.record(false, || json!({"operator": label, "problem": "numerical inconsistency"})),
        }
    };
    for name in BUNDLED_STOCHASTIC {
        compare(&mut tally, &bundled_stochastic(name), json!(name), seed);
    }
    for i in 0..RANDOM_INSTANCES {
        let n = rng.random_range(1..=8);
        let t = random_stochastic_idempotent(n, 0.5, &mut rng);
        let rows: Vec<Value> = t.rows().iter().map(|r| qs_json(r)).collect();
        compare(&mut tally, &t, json!({"instance": i, "rows": rows}), sub_seed(seed, 200 + i as u64));
    }
    let t = bundled_stochastic("counterexample3.stochastic.json");
    let expected = Some((vec![q(1, 1), q(0, 1), q(1, 2)], vec![q(0, 1), q(1, 1), q(1, 2)]));
    let ok = match (is_strong_commutative(&t, seed), is_ce_commutative(&t, seed)) {
        (Ok(s), Ok(c)) => !s.holds && !c.holds && s.witness == expected && c.witness == expected,
        _ => false,
    };
    tally.record(ok, || json!({"example": "counterexample3", "problem": "unexpected witnesses"}));
    tally.detail("strong", strong_count);
    tally
}

fn mv_conditional_expectation_check(seed: u64, _: &Tolerances) -> Tally {
    let mut tally = Tally::default();
    let mut rng = sub_rng(seed, 11);
    let mut crisp_sets = 0u64;
    for i in 0..RANDOM_INSTANCES {
        let n = rng.random_range(1..=8);
        let space = random_prob_space(n, 0.3, &mut rng);
        let partition = random_partition(n, &mut rng);
        let a = random_fuzzy(n, 6, &mut rng);
        let b = random_fuzzy(n, 6, &mut rng);
        let ok = match check_mv_conditional_expectation(&space, &partition, &a, &b) {
            Ok(r) => {
                crisp_sets += r.crisp_sets_checked as u64;
                r.holds()
            }
            Err(_) => false,
        };
        tally.record(ok, || json!({"instance": i, "weights": qs_json(space.weights()), "blocks": partition.blocks(), "a": qs_json(a.values())}));
    }
    tally.detail("crisp_sets_checked", crisp_sets);
    tally
}

fn family(n: usize) -> Vec<FuzzyEventVector> {
    let mut out: Vec<FuzzyEventVector> = (0..n).map(|x| FuzzyEventVector::indicator(n, &[x])).collect();
    out.push(FuzzyEventVector::constant(n, q(1, 2)));
    out.push(FuzzyEventVector::new((0..n).map(|x| q((x % 4) as i64, 3).min(Q::from_integer(1.into()))).collect()).expect("in [0, 1]"));
    out
}

fn restricted(space: &FiniteProbSpace, points: &[usize]) -> FiniteProbSpace {
    FiniteProbSpace::new(points.iter().map(|&x| space.weights()[x].clone()).collect()).expect("support has full mass")
}

fn quotient_case(tally: &mut Tally, label: Value, space: &FiniteProbSpace, partition: &BlockPartition) {
    let ok = match quotient_strong_operator(space, partition) {
        Ok(out) => {
            let s = restricted(space, &out.points);
            out.strong
                && out.range_is_block_constants
                && out.null_points_ignored
                && mv_ce_from_strong_operator(&out.t, &s, &family(out.points.len())).is_ok_and(|r| r.identity_holds)
        }
        Err(_) => false,
    };
    tally.record(ok, || label);
}

fn quotient_strong_check(seed: u64, _: &Tolerances) -> Tally {
    let mut tally = Tally::default();
    for name in ["mixed5.prob.json", "null4.prob.json", "uniform4.prob.json"] {
        let source = Source::parse(name, input::bundled(name).expect("bundled file")).expect("bundled JSON");
        let (space, blocks) = input::probability(&source).expect("bundled probability");
        let partition = BlockPartition::new(space.len(), blocks.expect("bundled blocks")).expect("bundled partition");
        quotient_case(&mut tally, json!(name), &space, &partition);
    }
    for name in BUNDLED_STOCHASTIC {
        let t = bundled_stochastic(name);
        if !is_strong_commutative(&t, seed).is_ok_and(|d| d.holds) {
            continue;
        }
        let n = t.len();
        let mut point = vec![Q::from_integer(0.into()); n];
        point[n - 1] = Q::from_integer(1.into());
        for s in [FiniteProbSpace::uniform(n), FiniteProbSpace::new(point).expect("point mass")] {
            let ok = mv_ce_from_strong_operator(&t, &s, &family(n)).is_ok_and(|r| r.identity_holds);
            tally.record(ok, || json!({"operator": name, "weights": qs_json(s.weights())}));
        }
    }
    let mut rng = sub_rng(seed, 12);
    for i in 0..BLOCK_MAPS {
        let n = rng.random_range(1..=8);
        let space = random_prob_space(n, 0.3, &mut rng);
        let partition = random_partition(n, &mut rng);
        quotient_case(&mut tally, json!({"instance": i}), &space, &partition);
    }
    tally
}
