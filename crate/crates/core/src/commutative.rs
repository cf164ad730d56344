//! Functions `X → [0, 1]` on a finite set: idempotent stochastic matrices as
//! state operators, strong operators versus conditional expectations, the
//! Jordan support set, and conditional expectations on finite probability
//! spaces. Everything is exact over the rationals; random cross-checks run
//! in floating point.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{in_unit_interval, qi, to_f64, Q};

/// Random pairs used to cross-check the exact strong and CE decisions.
pub const CROSS_CHECK_PAIRS: usize = 1000;
/// Tolerance for the floating-point cross-checks.
pub const CROSS_CHECK_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CommutativeError {
    #[error("value at index {0} is outside [0, 1]")]
    OutOfUnitInterval(usize),
    #[error("expected length {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("not an idempotent stochastic matrix")]
    InvalidStochastic(StochasticReport),
    #[error("invalid probability vector: {0}")]
    InvalidProbability(ProbabilityDefect),
    #[error("invalid partition: {0}")]
    InvalidPartition(PartitionDefect),
    #[error("operator is not strong")]
    NotStrong(Witness),
    #[error("operator is not Jordan")]
    NotJordan(Vec<Q>),
    #[error("numerical inconsistency: {0}")]
    Inconsistent(&'static str),
}

/// A `[0, 1]`-valued function on `{0, .., n-1}` with the tribe operations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuzzyEventVector {
    values: Vec<Q>,
}

impl FuzzyEventVector {
    pub fn new(values: Vec<Q>) -> Result<Self, CommutativeError> {
        if let Some(i) = values.iter().position(|v| !in_unit_interval(v)) {
            return Err(CommutativeError::OutOfUnitInterval(i));
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, value: Q) -> Self {
        Self {
            values: vec![value; n],
        }
    }

    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut values = vec![Q::zero(); n];
        for &x in set {
            values[x] = Q::one();
        }
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    fn zip(&self, other: &Self, f: impl Fn(&Q, &Q) -> Q) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// `min(f + g, 1)`
    pub fn boxplus(&self, other: &Self) -> Self {
        self.zip(other, |a, b| (a + b).min(Q::one()))
    }

    /// `max(f + g − 1, 0)`
    pub fn boxtimes(&self, other: &Self) -> Self {
        self.zip(other, |a, b| (a + b - Q::one()).max(Q::zero()))
    }

    /// `1 − f`
    pub fn neg(&self) -> Self {
        Self {
            values: self.values.iter().map(|a| Q::one() - a).collect(),
        }
    }

    pub fn wedge(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.min(b).clone())
    }

    pub fn vee(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.max(b).clone())
    }

    pub fn scale(&self, factor: &Q) -> Self {
        Self {
            values: self.values.iter().map(|a| a * factor).collect(),
        }
    }
}

pub type Matrix = Vec<Vec<Q>>;

pub fn mat_vec(t: &[Vec<Q>], f: &[Q]) -> Vec<Q> {
    t.iter()
        .map(|row| row.iter().zip(f).fold(Q::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

pub fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Matrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(Q::zero(), |acc, (x, brow)| acc + x * &brow[j]))
                .collect()
        })
        .collect()
}

fn pointwise(f: &[Q], g: &[Q], op: impl Fn(&Q, &Q) -> Q) -> Vec<Q> {
    f.iter().zip(g).map(|(a, b)| op(a, b)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StochasticViolation {
    NotSquare,
    Negative { row: usize, col: usize },
    RowSum { row: usize },
    NotIdempotent { row: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StochasticReport {
    pub violations: Vec<StochasticViolation>,
}

impl StochasticReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_stochastic_idempotent(t: &[Vec<Q>]) -> StochasticReport {
    let n = t.len();
    let mut violations = Vec::new();
    if t.iter().any(|row| row.len() != n) {
        violations.push(StochasticViolation::NotSquare);
        return StochasticReport { violations };
    }
    for (row, values) in t.iter().enumerate() {
        for (col, v) in values.iter().enumerate() {
            if v.is_negative() {
                violations.push(StochasticViolation::Negative { row, col });
            }
        }
        if values.iter().fold(Q::zero(), |acc, v| acc + v) != Q::one() {
            violations.push(StochasticViolation::RowSum { row });
        }
    }
    let square = mat_mul(t, t);
    for row in 0..n {
        for col in 0..n {
            if square[row][col] != t[row][col] {
                violations.push(StochasticViolation::NotIdempotent { row, col });
            }
        }
    }
    StochasticReport { violations }
}

/// Row-stochastic idempotent matrix, `T = Σ_j v_j π_jᵀ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticIdempotent {
    rows: Matrix,
    /// Nonzero columns.
    support: Vec<usize>,
    /// Supported states grouped by equal rows.
    classes: Vec<Vec<usize>>,
    /// `v_j(x) = Σ_{y ∈ S_j} T[x][y]`, spanning the range of `T`.
    generators: Vec<Vec<Q>>,
}

impl StochasticIdempotent {
    pub fn new(rows: Matrix) -> Result<Self, CommutativeError> {
        let report = validate_stochastic_idempotent(&rows);
        if !report.is_valid() {
            return Err(CommutativeError::InvalidStochastic(report));
        }
        let n = rows.len();
        let support: Vec<usize> = (0..n).filter(|&y| rows.iter().any(|r| !r[y].is_zero())).collect();
        let mut by_row: BTreeMap<&Vec<Q>, Vec<usize>> = BTreeMap::new();
        for &x in &support {
            by_row.entry(&rows[x]).or_default().push(x);
        }
        let mut classes: Vec<Vec<usize>> = by_row.into_values().collect();
        classes.sort();
        let generators = classes
            .iter()
            .map(|class| {
                rows.iter()
                    .map(|r| class.iter().fold(Q::zero(), |acc, &y| acc + &r[y]))
                    .collect()
            })
            .collect();
        Ok(Self {
            rows,
            support,
            classes,
            generators,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n).map(|i| (0..n).map(|j| qi((i == j) as i64)).collect()).collect())
            .expect("identity is idempotent")
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &Matrix {
        &self.rows
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn generators(&self) -> &[Vec<Q>] {
        &self.generators
    }

    pub fn apply(&self, f: &[Q]) -> Vec<Q> {
        mat_vec(&self.rows, f)
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.iter().map(to_f64).collect()).collect()
    }
}

/// A pair of `[0, 1]`-valued functions violating a universally quantified identity.
pub type Witness = (Vec<Q>, Vec<Q>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub holds: bool,
    pub witness: Option<Witness>,
}

fn f64_mat_vec(t: &[Vec<f64>], f: &[f64]) -> Vec<f64> {
    t.iter().map(|r| r.iter().zip(f).map(|(a, b)| a * b).sum()).collect()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest residual of `identity(T, f, g)` over random `f, g ∈ [0, 1]ⁿ`.
fn sampled_residual(
    t: &StochasticIdempotent,
    seed: u64,
    identity: impl Fn(&[Vec<f64>], &[f64], &[f64]) -> f64,
) -> f64 {
    let tf = t.to_f64();
    let n = t.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..CROSS_CHECK_PAIRS {
        let f: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let g: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        worst = worst.max(identity(&tf, &f, &g));
    }
    worst
}

/// `T(min(Tf, Tg)) = min(Tf, Tg)` for all `f, g`.
///
/// Decided on the range generators: a failure on some pair `(v_i, v_j)` is a
/// witness, and when every pair passes each `v_j` is `{0, 1}`-valued, so the
/// range consists of the functions constant on the level sets of the `v_j`
/// and is closed under `min`.
pub fn is_strong_commutative(t: &StochasticIdempotent, seed: u64) -> Result<Decision, CommutativeError> {
    let v = t.generators();
    let mut witness = None;
    'search: for i in 0..v.len() {
        for j in i + 1..v.len() {
            let m = pointwise(&v[i], &v[j], |a, b| a.min(b).clone());
            if t.apply(&m) != m {
                witness = Some((v[i].clone(), v[j].clone()));
                break 'search;
            }
        }
    }
    let crisp = v.iter().all(|g| g.iter().all(|x| x.is_zero() || x.is_one()));
    if crisp != witness.is_none() {
        return Err(CommutativeError::Inconsistent("pair test disagrees with crispness of the generators"));
    }
    let holds = witness.is_none();
    let residual = sampled_residual(t, seed, |tm, f, g| {
        let m: Vec<f64> = f64_mat_vec(tm, f).iter().zip(f64_mat_vec(tm, g)).map(|(a, b)| a.min(b)).collect();
        max_gap(&f64_mat_vec(tm, &m), &m)
    });
    if holds && residual > CROSS_CHECK_EPS {
        return Err(CommutativeError::Inconsistent("exact decision is strong but a sampled pair is not"));
    }
    Ok(Decision { holds, witness })
}

/// `T(Tf · g · Tf) = Tf · Tg · Tf` for all `f, g`.
///
/// Checked on pairs of range generators and the constant `1`, tried in the
/// order `(v_i, v_j)` for `i < j`, then `(v_i, v_i)`, then `(v_i, 1)`. The
/// last family forces `T(v_i²) = v_i²`, i.e. crisp generators, under which
/// the range is a subalgebra and the identity holds everywhere.
pub fn is_ce_commutative(t: &StochasticIdempotent, seed: u64) -> Result<Decision, CommutativeError> {
    let v = t.generators();
    let one = vec![Q::one(); t.len()];
    let violates = |f: &[Q], g: &[Q]| {
        let tf = t.apply(f);
        let tg = t.apply(g);
        let lhs = t.apply(&pointwise(&pointwise(&tf, g, |a, b| a * b), &tf, |a, b| a * b));
        let rhs = pointwise(&pointwise(&tf, &tg, |a, b| a * b), &tf, |a, b| a * b);
        lhs != rhs
    };
    let mut pairs: Vec<(&[Q], &[Q])> = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            pairs.push((&v[i], &v[j]));
        }
    }
    for g in v {
        pairs.push((g, g));
    }
    for g in v {
        pairs.push((g, &one));
    }
    let witness = pairs
        .into_iter()
        .find(|(f, g)| violates(f, g))
        .map(|(f, g)| (f.to_vec(), g.to_vec()));
    let holds = witness.is_none();
    let residual = sampled_residual(t, seed.wrapping_add(1), |tm, f, g| {
        let tf = f64_mat_vec(tm, f);
        let tg = f64_mat_vec(tm, g);
        let inner: Vec<f64> = (0..f.len()).map(|x| tf[x] * g[x] * tf[x]).collect();
        let rhs: Vec<f64> = (0..f.len()).map(|x| tf[x] * tg[x] * tf[x]).collect();
        max_gap(&f64_mat_vec(tm, &inner), &rhs)
    });
    if holds && residual > CROSS_CHECK_EPS {
        return Err(CommutativeError::Inconsistent("exact decision is a conditional expectation but a sampled pair is not"));
    }
    Ok(Decision { holds, witness })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanSupport {
    /// States whose row of `T` is the unit vector.
    pub k: Vec<usize>,
    /// Columns of `T` indexed by `K`: `τ(f) = φ(f|_K)`.
    pub phi: Matrix,
    /// `Tf = φ(f|_K)` for all `f`, i.e. columns outside `K` vanish.
    pub extension_check: bool,
}

/// Bilinear defect `T(f g) − T(Tf · Tg)` on coordinate pairs; returns the
/// first function (`e_x` or `e_x + e_y`) with `T(f²) ≠ T((Tf)²)`.
pub fn jordan_witness(t: &StochasticIdempotent) -> Option<Vec<Q>> {
    let n = t.len();
    let unit = |x: usize| -> Vec<Q> { (0..n).map(|y| qi((x == y) as i64)).collect() };
    let columns: Vec<Vec<Q>> = (0..n).map(|x| t.apply(&unit(x))).collect();
    let defect = |x: usize, y: usize| {
        let fg = pointwise(&unit(x), &unit(y), |a, b| a * b);
        t.apply(&fg) != t.apply(&pointwise(&columns[x], &columns[y], |a, b| a * b))
    };
    for x in 0..n {
        if defect(x, x) {
            return Some(unit(x));
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            if defect(x, y) {
                return Some(pointwise(&unit(x), &unit(y), |a, b| a + b));
            }
        }
    }
    None
}

pub fn jordan_support_characterization(t: &StochasticIdempotent) -> Result<JordanSupport, CommutativeError> {
    if let Some(f) = jordan_witness(t) {
        return Err(CommutativeError::NotJordan(f));
    }
    let n = t.len();
    let rows = t.rows();
    let k: Vec<usize> = (0..n)
        .filter(|&x| (0..n).all(|y| rows[x][y] == qi((x == y) as i64)))
        .collect();
    let phi = rows.iter().map(|r| k.iter().map(|&y| r[y].clone()).collect()).collect();
    let extension_check = (0..n).filter(|y| !k.contains(y)).all(|y| rows.iter().all(|r| r[y].is_zero()));
    Ok(JordanSupport {
        k,
        phi,
        extension_check,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelIdeals {
    /// Complement of the largest set `A` with `Tχ_A = 0`.
    pub k_support: Vec<usize>,
    /// `Tf = 0 ∧ f ≥ 0 ⟺ f|_K = 0` on the coordinate basis.
    pub coordinate_check: bool,
}

impl KernelIdeals {
    /// Membership in `I_τ = {f : f|_K = 0}`.
    pub fn contains(&self, f: &[Q]) -> bool {
        self.k_support.iter().all(|&x| f[x].is_zero())
    }
}

pub fn kernel_ideals(t: &StochasticIdempotent) -> KernelIdeals {
    let n = t.len();
    let unit = |x: usize| -> Vec<Q> { (0..n).map(|y| qi((x == y) as i64)).collect() };
    let annihilated: Vec<usize> = (0..n).filter(|&x| t.apply(&unit(x)).iter().all(Zero::is_zero)).collect();
    let crisp = FuzzyEventVector::indicator(n, &annihilated);
    let maximal = t.apply(crisp.values()).iter().all(Zero::is_zero);
    let k_support: Vec<usize> = (0..n).filter(|x| !annihilated.contains(x)).collect();
    let ideals = KernelIdeals {
        coordinate_check: false,
        k_support,
    };
    let coordinate_check = maximal
        && (0..n).all(|x| t.apply(&unit(x)).iter().all(Zero::is_zero) == ideals.contains(&unit(x)))
        && ideals.k_support == t.support();
    KernelIdeals {
        coordinate_check,
        ..ideals
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ProbabilityDefect {
    #[error("negative weight at index {0}")]
    Negative(usize),
    #[error("weights do not sum to 1")]
    NotNormalized,
    #[error("empty space")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteProbSpace {
    p: Vec<Q>,
}

impl FiniteProbSpace {
    pub fn new(p: Vec<Q>) -> Result<Self, CommutativeError> {
        if p.is_empty() {
            return Err(CommutativeError::InvalidProbability(ProbabilityDefect::Empty));
        }
        if let Some(i) = p.iter().position(Signed::is_negative) {
            return Err(CommutativeError::InvalidProbability(ProbabilityDefect::Negative(i)));
        }
        if p.iter().fold(Q::zero(), |acc, v| acc + v) != Q::one() {
            return Err(CommutativeError::InvalidProbability(ProbabilityDefect::NotNormalized));
        }
        Ok(Self { p })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            p: vec![Q::new(1.into(), (n as i64).into()); n],
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn weights(&self) -> &[Q] {
        &self.p
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.p.len()).filter(|&x| !self.p[x].is_zero()).collect()
    }

    pub fn mass(&self, set: &[usize]) -> Q {
        set.iter().fold(Q::zero(), |acc, &x| acc + &self.p[x])
    }

    /// `Σ_{x ∈ set} f(x) P(x)`
    pub fn integral(&self, f: &[Q], set: &[usize]) -> Q {
        set.iter().fold(Q::zero(), |acc, &x| acc + &f[x] * &self.p[x])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PartitionDefect {
    #[error("empty block {0}")]
    EmptyBlock(usize),
    #[error("point {0} is out of range")]
    OutOfRange(usize),
    #[error("point {0} lies in two blocks")]
    Overlap(usize),
    #[error("point {0} is not covered")]
    Uncovered(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    blocks: Vec<Vec<usize>>,
}

impl BlockPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, CommutativeError> {
        let mut seen = vec![false; n];
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(CommutativeError::InvalidPartition(PartitionDefect::EmptyBlock(i)));
            }
            for &x in block {
                if x >= n {
                    return Err(CommutativeError::InvalidPartition(PartitionDefect::OutOfRange(x)));
                }
                if seen[x] {
                    return Err(CommutativeError::InvalidPartition(PartitionDefect::Overlap(x)));
                }
                seen[x] = true;
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(CommutativeError::InvalidPartition(PartitionDefect::Uncovered(x)));
        }
        Ok(Self { blocks })
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            blocks: (0..n).map(|x| vec![x]).collect(),
        }
    }

    pub fn trivial(n: usize) -> Self {
        Self {
            blocks: vec![(0..n).collect()],
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Indicators of all unions of blocks, or of the single blocks when
    /// there are more than `limit` blocks.
    pub fn crisp_sets(&self, limit: usize) -> Vec<Vec<usize>> {
        let k = self.blocks.len();
        if k > limit {
            return self.blocks.clone();
        }
        (0u64..1 << k)
            .map(|mask| {
                let mut set: Vec<usize> = (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .flat_map(|i| self.blocks[i].iter().copied())
                    .collect();
                set.sort_unstable();
                set
            })
            .collect()
    }
}

/// Blocks are enumerated in full up to this count when checking identities
/// over crisp sets.
pub const CRISP_UNION_LIMIT: usize = 12;

fn check_sizes(space: &FiniteProbSpace, partition: &BlockPartition, n: usize) -> Result<(), CommutativeError> {
    let covered: usize = partition.blocks().iter().map(Vec::len).sum();
    for found in [covered, n] {
        if found != space.len() {
            return Err(CommutativeError::DimMismatch {
                expected: space.len(),
                found,
            });
        }
    }
    Ok(())
}

/// `m(a | N)`: on each block of positive mass the `P`-weighted average of
/// `a`, and `0` on null blocks.
pub fn mv_conditional_expectation(
    space: &FiniteProbSpace,
    partition: &BlockPartition,
    a: &FuzzyEventVector,
) -> Result<FuzzyEventVector, CommutativeError> {
    check_sizes(space, partition, a.len())?;
    let mut out = vec![Q::zero(); a.len()];
    for block in partition.blocks() {
        let mass = space.mass(block);
        if mass.is_zero() {
            continue;
        }
        let mean = space.integral(a.values(), block) / mass;
        for &x in block {
            out[x] = mean.clone();
        }
    }
    FuzzyEventVector::new(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KcondReport {
    /// `∫_U m(a|N) dP = ∫_U a dP` for every crisp `U` in the block algebra.
    pub integral_identity: bool,
    /// `m(0|N) = 0` and `m(1|N) = 1` on the support of `P`.
    pub zero_one: bool,
    /// `m(a ⊞ b|N) = m(a|N) + m(b|N)` with `b := min(b, 1 − a)`, so `a ⊡ b = 0`.
    pub additive: bool,
    /// Values in `[0, 1]`.
    pub unit_interval: bool,
    /// For `a_k = (k/K)·a`, `m(a_k|N)` increases to `m(a|N)`.
    pub monotone_chain: bool,
    pub crisp_sets_checked: usize,
}

impl KcondReport {
    pub fn holds(&self) -> bool {
        self.integral_identity && self.zero_one && self.additive && self.unit_interval && self.monotone_chain
    }
}

/// Steps of the increasing chain used for monotone continuity.
pub const CHAIN_STEPS: i64 = 8;

pub fn check_mv_conditional_expectation(
    space: &FiniteProbSpace,
    partition: &BlockPartition,
    a: &FuzzyEventVector,
    b: &FuzzyEventVector,
) -> Result<KcondReport, CommutativeError> {
    let n = a.len();
    let cond = |f: &FuzzyEventVector| mv_conditional_expectation(space, partition, f);
    let out = cond(a)?;
    let crisp = partition.crisp_sets(CRISP_UNION_LIMIT);
    let integral_identity = crisp
        .iter()
        .all(|u| space.integral(out.values(), u) == space.integral(a.values(), u));
    let support = space.support();
    let on_support = |f: &FuzzyEventVector, g: &FuzzyEventVector| support.iter().all(|&x| f.values()[x] == g.values()[x]);
    let zero = FuzzyEventVector::constant(n, Q::zero());
    let one = FuzzyEventVector::constant(n, Q::one());
    let zero_one = on_support(&cond(&zero)?, &zero) && on_support(&cond(&one)?, &one);

    let b = b.wedge(&a.neg());
    let sum = a.boxplus(&b);
    let additive = a.boxtimes(&b) == zero && {
        let lhs = cond(&sum)?;
        let rhs = pointwise(out.values(), cond(&b)?.values(), |x, y| x + y);
        support.iter().all(|&x| lhs.values()[x] == rhs[x])
    };
    let unit_interval = out.values().iter().all(in_unit_interval);
    let mut monotone_chain = true;
    let mut previous = cond(&zero)?;
    for k in 1..=CHAIN_STEPS {
        let step = cond(&a.scale(&Q::new(k.into(), CHAIN_STEPS.into())))?;
        monotone_chain &= previous.values().iter().zip(step.values()).all(|(p, s)| p <= s);
        previous = step;
    }
    monotone_chain &= previous == out;
    Ok(KcondReport {
        integral_identity,
        zero_one,
        additive,
        unit_interval,
        monotone_chain,
        crisp_sets_checked: crisp.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientOperator {
    /// Points of `support(P)`, in increasing order; row `i` of `t` is point `points[i]`.
    pub points: Vec<usize>,
    /// Blocks of the partition restricted to the support, re-indexed.
    pub blocks: Vec<Vec<usize>>,
    pub t: StochasticIdempotent,
    pub strong: bool,
    /// Range equals the block-constant vectors.
    pub range_is_block_constants: bool,
    /// Output on the support ignores values on null points.
    pub null_points_ignored: bool,
}

/// The matrix of `a ↦ m(a|N)` on `support(P)`.
pub fn quotient_strong_operator(
    space: &FiniteProbSpace,
    partition: &BlockPartition,
) -> Result<QuotientOperator, CommutativeError> {
    check_sizes(space, partition, space.len())?;
    let points = space.support();
    let index: BTreeMap<usize, usize> = points.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let blocks: Vec<Vec<usize>> = partition
        .blocks()
        .iter()
        .map(|b| b.iter().filter_map(|x| index.get(x).copied()).collect::<Vec<_>>())
        .filter(|b| !b.is_empty())
        .collect();
    let m = points.len();
    let mut rows = vec![vec![Q::zero(); m]; m];
    for (block, original) in blocks.iter().zip(partition.blocks().iter().filter(|b| !space.mass(b).is_zero())) {
        let mass = space.mass(original);
        for &i in block {
            for &j in block {
                rows[i][j] = &space.weights()[points[j]] / &mass;
            }
        }
    }
    let t = StochasticIdempotent::new(rows)?;
    let strong = is_strong_commutative(&t, 0)?.holds;
    let block_of = |i: usize| blocks.iter().position(|b| b.contains(&i)).expect("covered");
    let columns_block_constant = (0..m).all(|j| {
        (0..m).all(|i| (0..m).all(|k| block_of(i) != block_of(k) || t.rows()[i][j] == t.rows()[k][j]))
    });
    let indicators_fixed = blocks.iter().all(|b| {
        let chi = FuzzyEventVector::indicator(m, b);
        t.apply(chi.values()) == chi.values()
    });
    let range_is_block_constants = columns_block_constant && indicators_fixed;

    let n = space.len();
    let probe = FuzzyEventVector::new((0..n).map(|x| Q::new(((x % 3) as i64).into(), 2.into())).collect())
        .expect("values in [0, 1]");
    let mut perturbed = probe.clone();
    for x in (0..n).filter(|x| !index.contains_key(x)) {
        perturbed.values[x] = Q::one() - &perturbed.values[x];
    }
    let full = mv_conditional_expectation(space, partition, &probe)?;
    let full_perturbed = mv_conditional_expectation(space, partition, &perturbed)?;
    let restricted: Vec<Q> = points.iter().map(|&x| probe.values()[x].clone()).collect();
    let quotient = t.apply(&restricted);
    let null_points_ignored = points
        .iter()
        .enumerate()
        .all(|(i, &x)| full.values()[x] == full_perturbed.values()[x] && full.values()[x] == quotient[i]);
    Ok(QuotientOperator {
        points,
        blocks,
        t,
        strong,
        range_is_block_constants,
        null_points_ignored,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvCeReport {
    /// Measure of `m = s∘T`, i.e. `μ = sᵀT`.
    pub mu: Vec<Q>,
    /// Crisp range elements: indicators of unions of the generator supports.
    pub crisp_checked: usize,
    pub functions_checked: usize,
    /// `∫ (Ta) b dμ = m(a ∧ b)` for every tested `a` and crisp `b`.
    pub identity_holds: bool,
}

/// Verifies that a strong operator `T` with a probability vector `s` yields
/// the conditional expectation of `m = s∘T` onto the range of `T`.
pub fn mv_ce_from_strong_operator(
    t: &StochasticIdempotent,
    s: &FiniteProbSpace,
    family: &[FuzzyEventVector],
) -> Result<MvCeReport, CommutativeError> {
    let n = t.len();
    if s.len() != n {
        return Err(CommutativeError::DimMismatch {
            expected: n,
            found: s.len(),
        });
    }
    let strong = is_strong_commutative(t, 0)?;
    if let Some(w) = strong.witness {
        return Err(CommutativeError::NotStrong(w));
    }
    let mu: Vec<Q> = (0..n)
        .map(|y| (0..n).fold(Q::zero(), |acc, x| acc + &s.weights()[x] * &t.rows()[x][y]))
        .collect();
    let atoms: Vec<Vec<usize>> = t
        .generators()
        .iter()
        .map(|v| (0..n).filter(|&x| v[x].is_one()).collect())
        .collect();
    let crisp = BlockPartition { blocks: atoms }.crisp_sets(CRISP_UNION_LIMIT);
    let all: Vec<usize> = (0..n).collect();
    let mut identity_holds = true;
    for a in family {
        if a.len() != n {
            return Err(CommutativeError::DimMismatch {
                expected: n,
                found: a.len(),
            });
        }
        let ta = t.apply(a.values());
        for set in &crisp {
            let b = FuzzyEventVector::indicator(n, set);
            let lhs = all.iter().fold(Q::zero(), |acc, &x| acc + &ta[x] * &b.values()[x] * &mu[x]);
            let meet = a.wedge(&b);
            let rhs = all.iter().fold(Q::zero(), |acc, &x| acc + &meet.values()[x] * &mu[x]);
            identity_holds &= lhs == rhs;
        }
    }
    Ok(MvCeReport {
        mu,
        crisp_checked: crisp.len(),
        functions_checked: family.len(),
        identity_holds,
    })
}

fn random_weights(len: usize, rng: &mut ChaCha8Rng) -> Vec<Q> {
    let raw: Vec<i64> = (0..len).map(|_| rng.random_range(1..=4)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| Q::new(w.into(), total.into())).collect()
}

/// Random idempotent stochastic matrix assembled as `Σ_j v_j π_jᵀ`: a random
/// support split into classes, random row distributions `π_j` on the
/// classes, and random class weights `v(x)` for unsupported states, which
/// are crisp with probability `crisp`.
pub fn random_stochastic_idempotent(n: usize, crisp: f64, rng: &mut ChaCha8Rng) -> StochasticIdempotent {
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(rng);
    let supported = rng.random_range(1..=n);
    let classes = rng.random_range(1..=supported);
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &x) in states[..supported].iter().enumerate() {
        let j = if i < classes { i } else { rng.random_range(0..classes) };
        groups[j].push(x);
    }
    let pis: Vec<Vec<Q>> = groups
        .iter()
        .map(|g| {
            let w = random_weights(g.len(), rng);
            let mut pi = vec![Q::zero(); n];
            for (&x, w) in g.iter().zip(w) {
                pi[x] = w;
            }
            pi
        })
        .collect();
    let mut class_weights: Vec<Vec<Q>> = vec![vec![Q::zero(); classes]; n];
    for (j, g) in groups.iter().enumerate() {
        for &x in g {
            class_weights[x][j] = Q::one();
        }
    }
    for &x in &states[supported..] {
        if classes == 1 || rng.random_bool(crisp) {
            class_weights[x][rng.random_range(0..classes)] = Q::one();
        } else {
            class_weights[x] = random_weights(classes, rng);
        }
    }
    let rows = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| (0..classes).fold(Q::zero(), |acc, j| acc + &class_weights[x][j] * &pis[j][y]))
                .collect()
        })
        .collect();
    StochasticIdempotent::new(rows).expect("Σ v_j π_jᵀ with π_i(v_j) = δ_ij is idempotent")
}

pub fn random_prob_space(n: usize, null_chance: f64, rng: &mut ChaCha8Rng) -> FiniteProbSpace {
    let keep = rng.random_range(0..n);
    let raw: Vec<i64> = (0..n)
        .map(|x| if x != keep && rng.random_bool(null_chance) { 0 } else { rng.random_range(1..=5) })
        .collect();
    let total: i64 = raw.iter().sum();
    FiniteProbSpace::new(raw.into_iter().map(|w| Q::new(w.into(), total.into())).collect())
        .expect("normalized nonnegative weights")
}

pub fn random_partition(n: usize, rng: &mut ChaCha8Rng) -> BlockPartition {
    let k = rng.random_range(1..=n);
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(rng);
    let mut blocks = vec![Vec::new(); k];
    for (i, &x) in states.iter().enumerate() {
        let j = if i < k { i } else { rng.random_range(0..k) };
        blocks[j].push(x);
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort();
    BlockPartition::new(n, blocks).expect("random partition")
}

/// Random fuzzy event with values `k/den`.
pub fn random_fuzzy(n: usize, den: i64, rng: &mut ChaCha8Rng) -> FuzzyEventVector {
    FuzzyEventVector::new((0..n).map(|_| Q::new(rng.random_range(0..=den).into(), den.into())).collect())
        .expect("values in [0, 1]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn matrix(rows: &[&[(i64, i64)]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&(a, b)| q(a, b)).collect()).collect()
    }

    fn collapse() -> StochasticIdempotent {
        StochasticIdempotent::new(matrix(&[&[(1, 1), (0, 1)], &[(1, 1), (0, 1)]])).unwrap()
    }

    fn counterexample() -> StochasticIdempotent {
        StochasticIdempotent::new(matrix(&[
            &[(1, 1), (0, 1), (0, 1)],
            &[(0, 1), (1, 1), (0, 1)],
            &[(1, 2), (1, 2), (0, 1)],
        ]))
        .unwrap()
    }

    fn fuzzy(values: &[(i64, i64)]) -> FuzzyEventVector {
        FuzzyEventVector::new(values.iter().map(|&(a, b)| q(a, b)).collect()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(validate_stochastic_idempotent(StochasticIdempotent::identity(3).rows()).is_valid());
        assert!(validate_stochastic_idempotent(collapse().rows()).is_valid());
        assert!(validate_stochastic_idempotent(counterexample().rows()).is_valid());
        let report = validate_stochastic_idempotent(&matrix(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]));
        assert!(report.violations.contains(&StochasticViolation::NotIdempotent { row: 0, col: 0 }));
        let report = validate_stochastic_idempotent(&matrix(&[&[(1, 2), (1, 1)], &[(0, 1), (1, 1)]]));
        assert!(report.violations.contains(&StochasticViolation::RowSum { row: 0 }));
    }

    #[test]
    fn strong_and_ce_examples() {
        for t in [collapse(), StochasticIdempotent::identity(4)] {
            assert!(is_strong_commutative(&t, 1).unwrap().holds);
            assert!(is_ce_commutative(&t, 1).unwrap().holds);
        }
        let t = counterexample();
        let strong = is_strong_commutative(&t, 1).unwrap();
        let ce = is_ce_commutative(&t, 1).unwrap();
        assert!(!strong.holds && !ce.holds);
        let expected = (vec![q(1, 1), q(0, 1), q(1, 2)], vec![q(0, 1), q(1, 1), q(1, 2)]);
        assert_eq!(strong.witness, Some(expected.clone()));
        assert_eq!(ce.witness, Some(expected.clone()));
        let m = pointwise(&expected.0, &expected.1, |a, b| a.min(b).clone());
        assert_eq!(m, vec![q(0, 1), q(0, 1), q(1, 2)]);
        assert_eq!(t.apply(&m), vec![q(0, 1); 3]);
    }

    #[test]
    fn jordan_support_examples() {
        let j = jordan_support_characterization(&collapse()).unwrap();
        assert_eq!(j.k, vec![0]);
        assert!(j.extension_check);
        let j = jordan_support_characterization(&StochasticIdempotent::identity(3)).unwrap();
        assert_eq!(j.k, vec![0, 1, 2]);
        let j = jordan_support_characterization(&counterexample()).unwrap();
        assert_eq!(j.k, vec![0, 1]);
        assert_eq!(j.phi, matrix(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)], &[(1, 2), (1, 2)]]));
        assert!(j.extension_check);
    }

    #[test]
    fn non_jordan_operator_is_refused() {
        // Averaging over two states is not Jordan: T(e_0²) ≠ T((Te_0)²).
        let t = StochasticIdempotent::new(matrix(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]])).unwrap();
        assert_eq!(
            jordan_support_characterization(&t),
            Err(CommutativeError::NotJordan(vec![q(1, 1), q(0, 1)]))
        );
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_ideals(&StochasticIdempotent::identity(3));
        assert_eq!(k.k_support, vec![0, 1, 2]);
        assert!(k.coordinate_check);
        let k = kernel_ideals(&collapse());
        assert_eq!(k.k_support, vec![0]);
        assert!(k.contains(&[q(0, 1), q(1, 2)]));
        assert_eq!(kernel_ideals(&counterexample()).k_support, vec![0, 1]);
    }

    #[test]
    fn conditional_expectation_examples() {
        let space = FiniteProbSpace::uniform(4);
        let blocks = BlockPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let a = fuzzy(&[(1, 1), (0, 1), (1, 1), (1, 1)]);
        assert_eq!(
            mv_conditional_expectation(&space, &blocks, &a).unwrap(),
            fuzzy(&[(1, 2), (1, 2), (1, 1), (1, 1)])
        );
        let singletons = BlockPartition::singletons(4);
        assert_eq!(mv_conditional_expectation(&space, &singletons, &a).unwrap(), a);
        let trivial = BlockPartition::trivial(4);
        assert_eq!(
            mv_conditional_expectation(&space, &trivial, &a).unwrap(),
            FuzzyEventVector::constant(4, q(3, 4))
        );
        let b = fuzzy(&[(1, 3), (1, 1), (0, 1), (1, 2)]);
        assert!(check_mv_conditional_expectation(&space, &blocks, &a, &b).unwrap().holds());
    }

    #[test]
    fn null_blocks_are_zero() {
        let space = FiniteProbSpace::new(vec![q(1, 2), q(1, 2), q(0, 1), q(0, 1)]).unwrap();
        let blocks = BlockPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let a = fuzzy(&[(1, 1), (0, 1), (1, 1), (1, 1)]);
        assert_eq!(
            mv_conditional_expectation(&space, &blocks, &a).unwrap(),
            fuzzy(&[(1, 2), (1, 2), (0, 1), (0, 1)])
        );
        let quotient = quotient_strong_operator(&space, &blocks).unwrap();
        assert_eq!(quotient.points, vec![0, 1]);
        assert_eq!(quotient.t.rows(), &matrix(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]));
        assert!(quotient.strong && quotient.range_is_block_constants && quotient.null_points_ignored);
    }

    #[test]
    fn quotient_examples() {
        let space = FiniteProbSpace::uniform(4);
        let blocks = BlockPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let quotient = quotient_strong_operator(&space, &blocks).unwrap();
        assert!(quotient.strong && quotient.range_is_block_constants);
        let singletons = quotient_strong_operator(&space, &BlockPartition::singletons(4)).unwrap();
        assert_eq!(singletons.t, StochasticIdempotent::identity(4));
    }

    #[test]
    fn partition_and_space_validation() {
        assert_eq!(
            BlockPartition::new(3, vec![vec![0, 1], vec![1, 2]]),
            Err(CommutativeError::InvalidPartition(PartitionDefect::Overlap(1)))
        );
        assert_eq!(
            BlockPartition::new(3, vec![vec![0, 1]]),
            Err(CommutativeError::InvalidPartition(PartitionDefect::Uncovered(2)))
        );
        assert_eq!(
            FiniteProbSpace::new(vec![q(1, 2), q(1, 3)]),
            Err(CommutativeError::InvalidProbability(ProbabilityDefect::NotNormalized))
        );
    }

    #[test]
    fn mv_ce_examples() {
        let family: Vec<FuzzyEventVector> = vec![
            fuzzy(&[(1, 3), (2, 3)]),
            fuzzy(&[(1, 1), (0, 1)]),
            fuzzy(&[(1, 2), (1, 2)]),
        ];
        let s = FiniteProbSpace::new(vec![q(1, 4), q(3, 4)]).unwrap();
        let report = mv_ce_from_strong_operator(&collapse(), &s, &family).unwrap();
        assert_eq!(report.mu, vec![q(1, 1), q(0, 1)]);
        assert!(report.identity_holds);
        let report = mv_ce_from_strong_operator(&StochasticIdempotent::identity(2), &s, &family).unwrap();
        assert!(report.identity_holds);
        assert!(matches!(
            mv_ce_from_strong_operator(&counterexample(), &FiniteProbSpace::uniform(3), &[]),
            Err(CommutativeError::NotStrong(_))
        ));
    }

    #[test]
    fn random_idempotents_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=8 {
            for _ in 0..20 {
                let t = random_stochastic_idempotent(n, 0.5, &mut rng);
                assert!(validate_stochastic_idempotent(t.rows()).is_valid());
            }
        }
    }
}
