//! State-operator, Kadison–Schwarz, conditional-expectation and Jordan checks.

use alloc::vec::Vec;

use super::random::{effect_from_hermitian, random_effect, random_effect_in, random_unit_vector, rng};
use super::{
    column_projector, coords, distance, from_coords, hermitian_basis, identity, jordan, min_eigenvalue,
    op_norm, psd_null_space, real_null_space, real_range, CMatrix, HermitianEffect, HermitianMap, JcError,
    RMatrix, Tolerances,
};

/// Random unit vectors used when the Choi matrix does not certify positivity.
pub const POSITIVITY_SAMPLES: usize = 10_000;
/// Random effects (or effect pairs) used to cross-check exact decisions.
pub const CROSS_CHECK_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Positivity {
    /// Choi matrix is positive semidefinite, hence the map is positive.
    Choi { min_eigenvalue: f64 },
    /// Smallest eigenvalue of `m(vv*)` over random unit vectors and the
    /// computational basis.
    Sampled { min_eigenvalue: f64, samples: usize },
}

impl Positivity {
    pub fn min_eigenvalue(&self) -> f64 {
        match *self {
            Positivity::Choi { min_eigenvalue } | Positivity::Sampled { min_eigenvalue, .. } => min_eigenvalue,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateOperatorCheck {
    pub unital_residual: f64,
    pub idempotence_residual: f64,
    pub positivity: Positivity,
    pub is_unital: bool,
    pub is_positive: bool,
    pub is_idempotent: bool,
}

impl StateOperatorCheck {
    pub fn is_state_operator(&self) -> bool {
        self.is_unital && self.is_positive && self.is_idempotent
    }
}

pub fn check_state_operator(m: &HermitianMap, tol: &Tolerances, seed: u64) -> StateOperatorCheck {
    let d = m.dim();
    let unital_residual = distance(&m.apply(&identity(d)), &identity(d));
    let idempotence_residual = m.compose(m).distance(m);
    let choi = min_eigenvalue(&m.choi_matrix());
    let positivity = if choi >= -tol.eps_psd {
        Positivity::Choi { min_eigenvalue: choi }
    } else {
        let mut rng = rng(seed);
        let mut worst = f64::INFINITY;
        for i in 0..d {
            let mut e = CMatrix::zeros(d, d);
            e[(i, i)] = super::C::new(1.0, 0.0);
            worst = worst.min(min_eigenvalue(&m.apply(&e)));
        }
        for _ in 0..POSITIVITY_SAMPLES {
            let v = random_unit_vector(d, &mut rng);
            worst = worst.min(min_eigenvalue(&m.apply(&(&v * v.adjoint()))));
        }
        Positivity::Sampled {
            min_eigenvalue: worst,
            samples: POSITIVITY_SAMPLES + d,
        }
    };
    StateOperatorCheck {
        unital_residual,
        idempotence_residual,
        is_unital: unital_residual <= tol.eps_eq,
        is_positive: positivity.min_eigenvalue() >= -tol.eps_psd,
        is_idempotent: idempotence_residual <= tol.eps_eq,
        positivity,
    }
}

fn require_state_operator(m: &HermitianMap, tol: &Tolerances, seed: u64) -> Result<(), JcError> {
    let check = check_state_operator(m, tol, seed);
    if check.is_state_operator() {
        Ok(())
    } else {
        Err(JcError::NotStateOperator(check))
    }
}

/// Smallest eigenvalue of `m*(I)`; positive exactly when `m` is faithful
/// on positive matrices.
pub fn faithfulness_gap(m: &HermitianMap) -> f64 {
    min_eigenvalue(&m.dual_unit())
}

pub fn is_faithful(m: &HermitianMap, tol: &Tolerances) -> bool {
    faithfulness_gap(m) > tol.rank()
}

/// Smallest eigenvalues of `τ(τ(a)²) − τ(a)²` and `τ(a²) − τ(τ(a)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsGaps {
    pub lhs_gap: f64,
    pub rhs_gap: f64,
}

impl KsGaps {
    pub fn holds(&self, tol: &Tolerances) -> bool {
        self.lhs_gap >= -tol.eps_psd && self.rhs_gap >= -tol.eps_psd
    }
}

pub fn kadison_schwarz_check(m: &HermitianMap, a: &HermitianEffect) -> Result<KsGaps, JcError> {
    if a.dim() != m.dim() {
        return Err(JcError::DimMismatch {
            expected: m.dim(),
            found: a.dim(),
        });
    }
    let a = a.matrix();
    let ta = m.apply(a);
    let ta2 = &ta * &ta;
    let t_ta2 = m.apply(&ta2);
    let t_a2 = m.apply(&(a * a));
    Ok(KsGaps {
        lhs_gap: min_eigenvalue(&(&t_ta2 - &ta2)),
        rhs_gap: min_eigenvalue(&(t_a2 - t_ta2)),
    })
}

/// `‖τ(τ(a) b τ(a)) − τ(a) τ(b) τ(a)‖`
pub fn ce_residual(m: &HermitianMap, a: &CMatrix, b: &CMatrix) -> f64 {
    let ta = m.apply(a);
    let tb = m.apply(b);
    distance(&m.apply(&(&ta * b * &ta)), &(&ta * tb * &ta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CeDecision {
    pub holds: bool,
    /// Effects `(a, b)` violating `τ(τ(a) b τ(a)) = τ(a) τ(b) τ(a)`.
    pub witness: Option<(CMatrix, CMatrix)>,
    /// Largest distance of a Jordan product of range elements from the range.
    pub closure_residual: f64,
    /// Largest residual over the random effect pairs.
    pub sampled_residual: f64,
}

/// Orthonormal coordinate basis of the range of `m`.
pub fn range_basis(m: &HermitianMap, tol: &Tolerances) -> RMatrix {
    real_range(m.matrix(), tol.rank())
}

/// First Hermitian `x` in the span of `basis` (one of the basis elements or
/// a sum of two of them) with `q(x) > eps`, where `q` is a quadratic defect
/// whose polarization is `bilinear`.
fn quadratic_witness(
    basis: &[CMatrix],
    bilinear: impl Fn(usize, usize) -> f64,
    eps: f64,
) -> (f64, Option<CMatrix>) {
    let mut worst: f64 = 0.0;
    let mut witness = None;
    for (i, x) in basis.iter().enumerate() {
        let r = bilinear(i, i);
        worst = worst.max(r);
        if r > eps && witness.is_none() {
            witness = Some(x.clone());
        }
    }
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let r = bilinear(i, j);
            worst = worst.max(r);
            if r > eps && witness.is_none() {
                witness = Some(&basis[i] + &basis[j]);
            }
        }
    }
    (worst, witness)
}

/// Decides `τ(τ(a) b τ(a)) = τ(a) τ(b) τ(a)` through Jordan closure of a
/// range basis, then cross-checks the condition on random effect pairs.
pub fn is_conditional_expectation(m: &HermitianMap, tol: &Tolerances, seed: u64) -> Result<CeDecision, JcError> {
    require_state_operator(m, tol, seed)?;
    let d = m.dim();
    let q = range_basis(m, tol);
    let basis: Vec<CMatrix> = q.column_iter().map(|c| from_coords(&c.into_owned(), d)).collect();
    let (closure_residual, offending) = quadratic_witness(
        &basis,
        |i, j| {
            let z = jordan(&basis[i], &basis[j]);
            distance(&m.apply(&z), &z)
        },
        tol.eps_eq,
    );
    let witness = offending.map(|x| (effect_from_hermitian(&x), identity(d)));
    if let Some((a, b)) = &witness {
        if ce_residual(m, a, b) <= tol.eps_eq {
            return Err(JcError::Inconsistent("range not Jordan closed but witness satisfies the identity"));
        }
    }
    let holds = witness.is_none();
    let mut rng = rng(seed);
    let mut sampled_residual: f64 = 0.0;
    for _ in 0..CROSS_CHECK_SAMPLES {
        let a = random_effect(d, &mut rng);
        let b = random_effect(d, &mut rng);
        sampled_residual = sampled_residual.max(ce_residual(m, &a, &b));
    }
    if holds && sampled_residual > tol.eps_eq {
        return Err(JcError::Inconsistent("range is Jordan closed but a sampled pair violates the identity"));
    }
    Ok(CeDecision {
        holds,
        witness,
        closure_residual,
        sampled_residual,
    })
}

/// Kernel of a Jordan state operator compared with `{c : τ(c²) = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealCheck {
    pub kernel_dimension: usize,
    pub square_kernel_dimension: usize,
    /// `{c : τ(c) = 0} = {c : τ(c²) = 0}` within tolerance.
    pub matches_kernel: bool,
    /// `τ(bcb) = 0` for kernel basis elements `c` and domain basis elements `b`.
    pub jordan_ideal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanDecision {
    pub holds: bool,
    /// Effect with `τ(a²) ≠ τ(τ(a)²)`.
    pub witness: Option<CMatrix>,
    pub basis_residual: f64,
    pub sampled_residual: f64,
    /// Present when `holds`.
    pub ideal: Option<IdealCheck>,
}

/// `τ(a²) = τ(τ(a)²)` on all Hermitian matrices.
pub fn is_jordan_state_operator(m: &HermitianMap, tol: &Tolerances, seed: u64) -> Result<JordanDecision, JcError> {
    let n = m.dim() * m.dim();
    is_jordan_on(m, &RMatrix::identity(n, n), tol, seed)
}

/// `τ(a²) = τ(τ(a)²)` for `a` in the span of the orthonormal coordinate
/// columns of `domain`, which must contain `I`, be invariant under `m` and
/// closed under Jordan products.
pub fn is_jordan_on(
    m: &HermitianMap,
    domain: &RMatrix,
    tol: &Tolerances,
    seed: u64,
) -> Result<JordanDecision, JcError> {
    require_state_operator(m, tol, seed)?;
    let d = m.dim();
    let proj = column_projector(domain);
    let mq = m.matrix() * domain;
    if (&proj * &mq - &mq).norm() > tol.subspace() {
        return Err(JcError::Inconsistent("domain is not invariant under the map"));
    }
    let unit = coords(&identity(d));
    if (&proj * &unit - &unit).norm() > tol.subspace() {
        return Err(JcError::Inconsistent("domain does not contain the identity"));
    }
    let basis: Vec<CMatrix> = domain.column_iter().map(|c| from_coords(&c.into_owned(), d)).collect();
    let images: Vec<CMatrix> = basis.iter().map(|b| m.apply(b)).collect();
    let (basis_residual, offending) = quadratic_witness(
        &basis,
        |i, j| {
            distance(
                &m.apply(&jordan(&basis[i], &basis[j])),
                &m.apply(&jordan(&images[i], &images[j])),
            )
        },
        tol.eps_eq,
    );
    let jordan_residual = |a: &CMatrix| {
        let ta = m.apply(a);
        distance(&m.apply(&(a * a)), &m.apply(&(&ta * &ta)))
    };
    let witness = offending.map(|x| effect_from_hermitian(&x));
    if let Some(a) = &witness {
        if jordan_residual(a) <= tol.eps_eq {
            return Err(JcError::Inconsistent("basis test failed but witness satisfies the identity"));
        }
    }
    let holds = witness.is_none();
    let mut rng = rng(seed);
    let mut sampled_residual: f64 = 0.0;
    for _ in 0..CROSS_CHECK_SAMPLES {
        let a = random_effect_in(domain, d, &mut rng);
        sampled_residual = sampled_residual.max(jordan_residual(&a));
    }
    if holds && sampled_residual > tol.eps_eq {
        return Err(JcError::Inconsistent("basis test passed but a sampled effect violates the identity"));
    }
    let ideal = holds.then(|| ideal_check(m, domain, &basis, tol));
    Ok(JordanDecision {
        holds,
        witness,
        basis_residual,
        sampled_residual,
        ideal,
    })
}

fn ideal_check(m: &HermitianMap, domain: &RMatrix, basis: &[CMatrix], tol: &Tolerances) -> IdealCheck {
    let d = m.dim();
    let kernel = domain * real_null_space(&(m.matrix() * domain), tol.rank());
    let k = basis.len();
    let trace_form = RMatrix::from_fn(k, k, |i, j| m.apply(&jordan(&basis[i], &basis[j])).trace().re);
    let square_kernel = domain * psd_null_space(&trace_form, tol.rank());
    let matches_kernel = kernel.ncols() == square_kernel.ncols()
        && (column_projector(&kernel) - column_projector(&square_kernel)).norm() <= tol.rank();
    let kernel_elements: Vec<CMatrix> = kernel.column_iter().map(|c| from_coords(&c.into_owned(), d)).collect();
    let jordan_ideal = kernel_elements
        .iter()
        .all(|c| basis.iter().all(|b| op_norm(&m.apply(&(b * c * b))) <= tol.subspace()));
    IdealCheck {
        kernel_dimension: kernel.ncols(),
        square_kernel_dimension: square_kernel.ncols(),
        matches_kernel,
        jordan_ideal,
    }
}

/// Truth values of three equivalent clauses with their residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaClauses {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub residuals: [f64; 3],
}

impl LemmaClauses {
    fn from_residuals(residuals: [f64; 3], eps: f64) -> Self {
        Self {
            a: residuals[0] <= eps,
            b: residuals[1] <= eps,
            c: residuals[2] <= eps,
            residuals,
        }
    }

    pub fn agree(&self) -> bool {
        self.a == self.b && self.b == self.c
    }
}

/// Clauses `p(a²) = p(a)²`, `p(b∘a) = p(b)∘p(a)` and
/// `p(aba) = p(a)p(b)p(a)`, the latter two over a basis of `b`.
pub fn equivalence_lemma_check(p: &HermitianMap, a: &CMatrix, tol: &Tolerances) -> Result<LemmaClauses, JcError> {
    if a.nrows() != p.dim() {
        return Err(JcError::DimMismatch {
            expected: p.dim(),
            found: a.nrows(),
        });
    }
    let pa = p.apply(a);
    let r_a = distance(&p.apply(&(a * a)), &(&pa * &pa));
    let mut r_b: f64 = 0.0;
    let mut r_c: f64 = 0.0;
    for b in hermitian_basis(p.dim()) {
        let pb = p.apply(&b);
        r_b = r_b.max(distance(&p.apply(&jordan(&b, a)), &jordan(&pb, &pa)));
        r_c = r_c.max(distance(&p.apply(&(a * &b * a)), &(&pa * &pb * &pa)));
    }
    Ok(LemmaClauses::from_residuals([r_a, r_b, r_c], tol.eps_eq))
}

/// Clauses `p(a²) = p(p(a)²)`, `p(a∘b) = p(p(a)∘p(b))` and
/// `p(aba) = p(p(a)p(b)p(a))` for an idempotent `p`.
pub fn second_lemma_check(p: &HermitianMap, a: &CMatrix, tol: &Tolerances) -> Result<LemmaClauses, JcError> {
    if a.nrows() != p.dim() {
        return Err(JcError::DimMismatch {
            expected: p.dim(),
            found: a.nrows(),
        });
    }
    let pa = p.apply(a);
    let r_a = distance(&p.apply(&(a * a)), &p.apply(&(&pa * &pa)));
    let mut r_b: f64 = 0.0;
    let mut r_c: f64 = 0.0;
    for b in hermitian_basis(p.dim()) {
        let pb = p.apply(&b);
        r_b = r_b.max(distance(&p.apply(&jordan(a, &b)), &p.apply(&jordan(&pa, &pb))));
        r_c = r_c.max(distance(&p.apply(&(a * &b * a)), &p.apply(&(&pa * &pb * &pa))));
    }
    Ok(LemmaClauses::from_residuals([r_a, r_b, r_c], tol.eps_eq))
}

#[cfg(test)]
mod tests {
    use alloc::vec;
    use super::*;
    use crate::jc::{luders_operator, vector_state_operator, Pvm, C};
    use nalgebra::DVector;

    fn real(rows: &[&[f64]]) -> CMatrix {
        CMatrix::from_fn(rows.len(), rows.len(), |i, j| C::new(rows[i][j], 0.0))
    }

    fn pinching() -> HermitianMap {
        let tol = Tolerances::default();
        luders_operator(
            &Pvm::new(vec![real(&[&[1.0, 0.0], &[0.0, 0.0]]), real(&[&[0.0, 0.0], &[0.0, 1.0]])], &tol).unwrap(),
        )
    }

    fn corner() -> HermitianMap {
        vector_state_operator(&DVector::from_vec(vec![C::new(1.0, 0.0), C::new(0.0, 0.0)]))
    }

    #[test]
    fn state_operator_examples() {
        let tol = Tolerances::default();
        assert!(check_state_operator(&pinching(), &tol, 1).is_state_operator());
        let c = check_state_operator(&corner(), &tol, 1);
        assert!(c.is_state_operator());
        assert!(!is_faithful(&corner(), &tol));
        assert!(is_faithful(&pinching(), &tol));
        let half_transpose = HermitianMap::from_fn(2, |x| x.transpose().scale(0.5));
        let c = check_state_operator(&half_transpose, &tol, 1);
        assert!(!c.is_unital);
        assert!(matches!(c.positivity, Positivity::Sampled { .. }));
        assert!(c.is_positive);
    }

    #[test]
    fn kadison_schwarz_examples() {
        let tol = Tolerances::default();
        let a = HermitianEffect::new(real(&[&[0.5, 0.3], &[0.3, 0.5]]), &tol).unwrap();
        let gaps = kadison_schwarz_check(&HermitianMap::identity(2), &a).unwrap();
        assert!(gaps.lhs_gap.abs() < 1e-15 && gaps.rhs_gap.abs() < 1e-15);
        let p = pinching();
        let pa = p.apply(a.matrix());
        let diff = p.apply(&(a.matrix() * a.matrix())) - &pa * &pa;
        assert!(distance(&diff, &identity(2).scale(0.09)) < 1e-15);
        assert!(kadison_schwarz_check(&p, &a).unwrap().holds(&tol));
    }

    #[test]
    fn ce_examples() {
        let tol = Tolerances::default();
        assert!(is_conditional_expectation(&pinching(), &tol, 3).unwrap().holds);
        assert!(is_conditional_expectation(&corner(), &tol, 3).unwrap().holds);
        assert!(is_conditional_expectation(&HermitianMap::identity(3), &tol, 3).unwrap().holds);
    }

    #[test]
    fn jordan_examples() {
        let tol = Tolerances::default();
        let corner = is_jordan_state_operator(&corner(), &tol, 5).unwrap();
        assert!(!corner.holds);
        let a = corner.witness.unwrap();
        assert!(HermitianEffect::new(a, &tol).is_ok());
        let id = is_jordan_state_operator(&HermitianMap::identity(2), &tol, 5).unwrap();
        assert!(id.holds);
        let ideal = id.ideal.unwrap();
        assert_eq!(ideal.kernel_dimension, 0);
        assert!(ideal.matches_kernel && ideal.jordan_ideal);
    }

    #[test]
    fn lemma_examples() {
        let tol = Tolerances::default();
        let p = pinching();
        let block = real(&[&[0.2, 0.0], &[0.0, 0.7]]);
        let clauses = equivalence_lemma_check(&p, &block, &tol).unwrap();
        assert!(clauses.a && clauses.b && clauses.c);
        let clauses = equivalence_lemma_check(&p, &real(&[&[0.5, 0.3], &[0.3, 0.5]]), &tol).unwrap();
        assert!(!clauses.a && !clauses.b && !clauses.c);
        let clauses = equivalence_lemma_check(&HermitianMap::identity(2), &real(&[&[0.5, 0.3], &[0.3, 0.5]]), &tol)
            .unwrap();
        assert!(clauses.a && clauses.b && clauses.c);
    }
}
