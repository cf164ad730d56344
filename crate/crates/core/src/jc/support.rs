//! Support projections, compressions, the faithful-times-Jordan
//! decomposition, and linear extension of effect-level maps.

use alloc::vec::Vec;

use super::checks::{check_state_operator, is_conditional_expectation, is_faithful, is_jordan_on};
use super::random::{random_effect, random_hermitian, rng, scalars};
use super::{
    column_projector, commutator, coords, distance, eigh, from_coords, hermitian_basis, identity, jordan,
    op_norm, psd_null_space, real_null_space, real_range, CMatrix, HermitianMap, JcError, RMatrix, Tolerances,
};

/// Random effects used to check `τ(a) = τ(eae)` and `eτ(a) = τ(a)e`.
pub const SUPPORT_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SupportDefect {
    #[error("complement of the support is not annihilated (residual {0:e})")]
    NotAnnihilated(f64),
    #[error("a projection annihilated by the map is not below the complement")]
    NotMaximal,
    #[error("τ(a) differs from τ(eae) (residual {0:e})")]
    NotCompressed(f64),
    #[error("support does not commute with the range (residual {0:e})")]
    NotCommuting(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Support {
    /// The support `e`.
    pub projection: CMatrix,
    pub rank: usize,
    /// Number of annihilated projections checked to lie below `I − e`.
    pub certified_family: usize,
}

fn projector(vectors: &CMatrix, columns: &[usize]) -> CMatrix {
    let d = vectors.nrows();
    let mut p = CMatrix::zeros(d, d);
    for &k in columns {
        let v = vectors.column(k);
        p += v * v.adjoint();
    }
    p
}

/// Spectral projections of `x`, grouping eigenvalues closer than `gap`.
fn spectral_projections(x: &CMatrix, gap: f64) -> Vec<CMatrix> {
    let (values, vectors) = eigh(x);
    let mut out = Vec::new();
    let mut group = Vec::new();
    for k in 0..values.len() {
        if let Some(&last) = group.last() {
            if values[k] - values[last] > gap {
                out.push(projector(&vectors, &group));
                group.clear();
            }
        }
        group.push(k);
    }
    if !group.is_empty() {
        out.push(projector(&vectors, &group));
    }
    out
}

/// Support of a state operator: `e` is the range projection of `σ = m*(I)`.
///
/// For a projection `g`, `m(g) ⪰ 0` vanishes iff `tr(σ g) = 0`, i.e. iff
/// `g ≤ I − e`, so `I − e` is the largest annihilated projection. The result
/// is certified against the spectral projections of a kernel basis and the
/// computational-basis projections.
pub fn support_projection(m: &HermitianMap, tol: &Tolerances, seed: u64) -> Result<Support, JcError> {
    let check = check_state_operator(m, tol, seed);
    if !check.is_state_operator() {
        return Err(JcError::NotStateOperator(check));
    }
    let d = m.dim();
    let (values, vectors) = eigh(&m.dual_unit());
    let kept: Vec<usize> = (0..d).filter(|&k| values[k] > tol.rank()).collect();
    let e = projector(&vectors, &kept);
    let f = identity(d) - &e;

    let annihilated = op_norm(&m.apply(&f));
    if annihilated > tol.subspace() {
        return Err(JcError::Support(SupportDefect::NotAnnihilated(annihilated)));
    }
    let mut family: Vec<CMatrix> = Vec::new();
    for c in real_null_space(m.matrix(), tol.rank()).column_iter() {
        family.extend(spectral_projections(&from_coords(&c.into_owned(), d), tol.rank()));
    }
    family.extend(hermitian_basis(d).into_iter().take(d));
    let mut certified_family = 0;
    for g in &family {
        if op_norm(&m.apply(g)) <= tol.subspace() {
            certified_family += 1;
            if distance(&(g * &f), g) > tol.rank() {
                return Err(JcError::Support(SupportDefect::NotMaximal));
            }
        }
    }
    let mut rng = rng(seed);
    for _ in 0..SUPPORT_SAMPLES {
        let a = random_effect(d, &mut rng);
        let ta = m.apply(&a);
        let r = distance(&ta, &m.apply(&(&e * &a * &e)));
        if r > tol.subspace() {
            return Err(JcError::Support(SupportDefect::NotCompressed(r)));
        }
        let r = op_norm(&commutator(&e, &ta));
        if r > tol.subspace() {
            return Err(JcError::Support(SupportDefect::NotCommuting(r)));
        }
    }
    Ok(Support {
        projection: e,
        rank: kept.len(),
        certified_family,
    })
}

/// Isometry `V` with `V V* = e` for a projection `e`.
pub fn projection_isometry(e: &CMatrix) -> CMatrix {
    let (values, vectors) = eigh(e);
    let kept: Vec<usize> = (0..values.len()).filter(|&k| values[k] > 0.5).collect();
    CMatrix::from_fn(e.nrows(), kept.len(), |r, c| vectors[(r, kept[c])])
}

/// `τ_e(a) = τ(a)e` on `e𝓔e`, transported to `rank(e) × rank(e)` matrices
/// through an isometry onto the range of `e`.
pub fn compress(m: &HermitianMap, e: &CMatrix, tol: &Tolerances, seed: u64) -> Result<HermitianMap, JcError> {
    let support = support_projection(m, tol, seed)?;
    if e.nrows() != m.dim() || distance(e, &support.projection) > tol.rank() {
        return Err(JcError::NotSupport);
    }
    let v = projection_isometry(&support.projection);
    let compressed = HermitianMap::from_fn(v.ncols(), |y| v.adjoint() * m.apply(&(&v * y * v.adjoint())) * &v);
    if !check_state_operator(&compressed, tol, seed).is_state_operator() {
        return Err(JcError::Inconsistent("compression is not a state operator"));
    }
    if !is_faithful(&compressed, tol) {
        return Err(JcError::Inconsistent("compression is not faithful"));
    }
    if !is_conditional_expectation(&compressed, tol, seed)?.holds {
        return Err(JcError::Inconsistent("compression is not a conditional expectation"));
    }
    Ok(compressed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DecompositionClause {
    #[error("μ is not a state operator")]
    MuNotStateOperator,
    #[error("μ is not faithful")]
    MuNotFaithful,
    #[error("μ is not a conditional expectation")]
    MuNotConditionalExpectation,
    #[error("range of μ differs from {{a : τ(a²) = τ(τ(a)²)}}")]
    RangeMismatch,
    #[error("τ does not map the range of μ into itself")]
    PhiNotEndomorphism,
    #[error("φ is not a Jordan state operator")]
    PhiNotJordan,
    #[error("φ∘μ differs from τ")]
    CompositionMismatch,
}

/// Restriction of a map to the span of orthonormal coordinate columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedMap {
    pub dim: usize,
    /// `d² × k` orthonormal coordinate columns.
    pub basis: RMatrix,
    /// `k × k` matrix in that basis.
    pub matrix: RMatrix,
}

impl RestrictedMap {
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        from_coords(&(&self.basis * (&self.matrix * (self.basis.transpose() * coords(x)))), self.dim)
    }

    /// The map `x ↦ φ(P x)` on all Hermitian matrices, with `P` the
    /// orthogonal projection onto the domain.
    pub fn extended(&self) -> HermitianMap {
        let m = &self.basis * &self.matrix * self.basis.transpose();
        HermitianMap::new(self.dim, m).expect("square by construction")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub support: CMatrix,
    pub mu: HermitianMap,
    pub phi: RestrictedMap,
    /// Basis of `{a : τ(a²) = τ(τ(a)²)}`.
    pub e_tau_basis: Vec<CMatrix>,
    /// Frobenius distance between the projectors onto `range μ` and the span of `e_tau_basis`.
    pub range_residual: f64,
    /// Frobenius distance between `φ∘μ` and `τ`.
    pub composition_residual: f64,
}

/// `τ = φ∘μ` with `μ(a) = τ(a)e + (1 − e)a(1 − e)` a faithful conditional
/// expectation and `φ` the restriction of `τ` to the range of `μ`.
pub fn decompose(m: &HermitianMap, tol: &Tolerances, seed: u64) -> Result<Decomposition, JcError> {
    let support = support_projection(m, tol, seed)?;
    let d = m.dim();
    let e = support.projection.clone();
    let f = identity(d) - &e;
    let mu = HermitianMap::from_fn(d, |x| m.apply(x) * &e + &f * x * &f);
    let fail = |clause| Err(JcError::Decomposition(clause));

    if !check_state_operator(&mu, tol, seed).is_state_operator() {
        return fail(DecompositionClause::MuNotStateOperator);
    }
    if !is_faithful(&mu, tol) {
        return fail(DecompositionClause::MuNotFaithful);
    }
    if !is_conditional_expectation(&mu, tol, seed)?.holds {
        return fail(DecompositionClause::MuNotConditionalExpectation);
    }

    let basis = hermitian_basis(d);
    let images: Vec<CMatrix> = basis.iter().map(|b| m.apply(b)).collect();
    let n = basis.len();
    let gram = RMatrix::from_fn(n, n, |k, l| {
        (m.apply(&jordan(&basis[k], &basis[l])) - m.apply(&jordan(&images[k], &images[l])))
            .trace()
            .re
    });
    let e_tau = psd_null_space(&gram, tol.rank());
    let range = real_range(mu.matrix(), tol.rank());
    let range_residual = (column_projector(&e_tau) - column_projector(&range)).norm();
    if e_tau.ncols() != range.ncols() || range_residual > tol.subspace() {
        return fail(DecompositionClause::RangeMismatch);
    }

    let mq = m.matrix() * &range;
    let phi_matrix = range.transpose() * &mq;
    if (&range * &phi_matrix - &mq).norm() > tol.subspace() {
        return fail(DecompositionClause::PhiNotEndomorphism);
    }
    if !is_jordan_on(m, &range, tol, seed)?.holds {
        return fail(DecompositionClause::PhiNotJordan);
    }
    let phi = RestrictedMap {
        dim: d,
        basis: range,
        matrix: phi_matrix,
    };
    let composition_residual = phi.extended().compose(&mu).distance(m);
    if composition_residual > tol.subspace() {
        return fail(DecompositionClause::CompositionMismatch);
    }
    Ok(Decomposition {
        support: e,
        mu,
        phi,
        e_tau_basis: e_tau.column_iter().map(|c| from_coords(&c.into_owned(), d)).collect(),
        range_residual,
        composition_residual,
    })
}

/// Random instances used by each spot check in [`extend_to_linear`].
pub const EXTENSION_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ExtensionDefect {
    #[error("not additive on orthogonal effects (residual {0:e})")]
    NotAdditive(f64),
    #[error("not idempotent (residual {0:e})")]
    NotIdempotent(f64),
    #[error("decompositions x = x⁺ − x⁻ and x = (x + cI) − cI disagree (residual {0:e})")]
    NotWellDefined(f64),
    #[error("not homogeneous (residual {0:e})")]
    NotHomogeneous(f64),
}

/// Linear extension `p` of an additive idempotent map `f` on effects:
/// `p(a) = ‖a‖ f(a/‖a‖)` on positive matrices and `p(x⁺ − x⁻) = p(x⁺) − p(x⁻)`.
pub fn extend_to_linear(
    d: usize,
    f: &dyn Fn(&CMatrix) -> CMatrix,
    tol: &Tolerances,
    seed: u64,
) -> Result<HermitianMap, JcError> {
    let reject = |defect| Err(JcError::Extension(defect));
    let mut rng = rng(seed);
    let mut additive: f64 = 0.0;
    let mut idempotent: f64 = 0.0;
    for k in 0..EXTENSION_SAMPLES {
        let lambda = (k as f64 + 0.5) / EXTENSION_SAMPLES as f64;
        let a = random_effect(d, &mut rng).scale(lambda);
        let b = random_effect(d, &mut rng).scale(1.0 - lambda);
        additive = additive.max(distance(&f(&(&a + &b)), &(f(&a) + f(&b))));
        let fa = f(&a);
        idempotent = idempotent.max(distance(&f(&fa), &fa));
    }
    if additive > tol.subspace() {
        return reject(ExtensionDefect::NotAdditive(additive));
    }
    if idempotent > tol.subspace() {
        return reject(ExtensionDefect::NotIdempotent(idempotent));
    }

    let positive = |a: &CMatrix| {
        let norm = op_norm(a);
        if norm == 0.0 {
            CMatrix::zeros(d, d)
        } else {
            f(&a.unscale(norm)).scale(norm)
        }
    };
    let spectral = |x: &CMatrix| {
        let (values, vectors) = eigh(x);
        let mut plus = CMatrix::zeros(d, d);
        let mut minus = CMatrix::zeros(d, d);
        for k in 0..d {
            let v = vectors.column(k);
            let p = v * v.adjoint();
            if values[k] > 0.0 {
                plus += p.scale(values[k]);
            } else {
                minus -= p.scale(values[k]);
            }
        }
        positive(&plus) - positive(&minus)
    };
    let p = HermitianMap::from_fn(d, spectral);

    let mut well_defined: f64 = 0.0;
    let mut homogeneous: f64 = 0.0;
    for _ in 0..EXTENSION_SAMPLES {
        let x = random_hermitian(d, &mut rng);
        let c = op_norm(&x);
        let shifted = positive(&(&x + identity(d).scale(c))) - positive(&identity(d).scale(c));
        well_defined = well_defined
            .max(distance(&spectral(&x), &shifted))
            .max(distance(&p.apply(&x), &shifted));
        let a = random_effect(d, &mut rng);
        let pa = positive(&a);
        for alpha in scalars() {
            homogeneous = homogeneous.max(distance(&positive(&a.scale(alpha)), &pa.scale(alpha)));
        }
    }
    if well_defined > tol.subspace() {
        return reject(ExtensionDefect::NotWellDefined(well_defined));
    }
    if homogeneous > tol.subspace() {
        return reject(ExtensionDefect::NotHomogeneous(homogeneous));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use alloc::vec;
    use super::*;
    use crate::jc::random::random_block_map;
    use crate::jc::{luders_operator, vector_state_operator, Pvm, C};
    use nalgebra::DVector;

    fn basis_vector(d: usize, i: usize) -> DVector<C> {
        DVector::from_fn(d, |k, _| C::new(if k == i { 1.0 } else { 0.0 }, 0.0))
    }

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| C::new(v, 0.0))))
    }

    #[test]
    fn support_of_faithful_and_corner_maps() {
        let tol = Tolerances::default();
        let pvm = Pvm::new(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])], &tol).unwrap();
        let s = support_projection(&luders_operator(&pvm), &tol, 0).unwrap();
        assert!(distance(&s.projection, &identity(2)) < 1e-12);
        let corner = vector_state_operator(&basis_vector(2, 0));
        let s = support_projection(&corner, &tol, 0).unwrap();
        assert!(distance(&s.projection, &diag(&[1.0, 0.0])) < 1e-12);
        assert_eq!(s.rank, 1);
    }

    #[test]
    fn compress_corner_is_identity() {
        let tol = Tolerances::default();
        let corner = vector_state_operator(&basis_vector(2, 0));
        let c = compress(&corner, &diag(&[1.0, 0.0]), &tol, 0).unwrap();
        assert!(c.distance(&HermitianMap::identity(1)) < 1e-12);
        assert_eq!(compress(&corner, &identity(2), &tol, 0), Err(JcError::NotSupport));
    }

    #[test]
    fn decompose_corner() {
        let tol = Tolerances::default();
        let corner = vector_state_operator(&basis_vector(2, 0));
        let dec = decompose(&corner, &tol, 0).unwrap();
        let pinching = luders_operator(&Pvm::new(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])], &tol).unwrap());
        assert!(dec.mu.distance(&pinching) < 1e-12);
        assert_eq!(dec.e_tau_basis.len(), 2);
        let x = diag(&[0.3, 0.8]);
        assert!(distance(&dec.phi.apply(&x), &identity(2).scale(0.3)) < 1e-12);
        assert!(dec.composition_residual < 1e-8);
    }

    #[test]
    fn decompose_faithful_map_is_trivial() {
        let tol = Tolerances::default();
        let pinching = luders_operator(&Pvm::new(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])], &tol).unwrap());
        let dec = decompose(&pinching, &tol, 0).unwrap();
        assert!(dec.mu.distance(&pinching) < 1e-12);
        assert!(dec.phi.extended().compose(&pinching).distance(&pinching) < 1e-12);
        let m = dec.phi.matrix;
        assert!((m.clone() - RMatrix::identity(m.nrows(), m.ncols())).norm() < 1e-12);
    }

    #[test]
    fn block_map_support_and_decomposition() {
        let tol = Tolerances::default();
        let mut rng = crate::jc::random::rng(17);
        for _ in 0..10 {
            let spec = random_block_map(3, &mut rng);
            let m = spec.map();
            let s = support_projection(&m, &tol, 1).unwrap();
            assert!(distance(&s.projection, &spec.expected_support()) < 1e-8);
            let dec = decompose(&m, &tol, 1).unwrap();
            assert!(dec.composition_residual < 1e-8);
        }
    }

    #[test]
    fn extension_of_linear_maps() {
        let tol = Tolerances::default();
        let corner = vector_state_operator(&basis_vector(2, 0));
        let p = extend_to_linear(2, &|a| corner.apply(a), &tol, 9).unwrap();
        assert!(p.distance(&corner) < 1e-12);
        let id = extend_to_linear(3, &|a| a.clone(), &tol, 9).unwrap();
        assert!(id.distance(&HermitianMap::identity(3)) < 1e-12);
        let squaring = extend_to_linear(2, &|a| a * a, &tol, 9);
        assert!(matches!(squaring, Err(JcError::Extension(ExtensionDefect::NotAdditive(_)))));
    }
}
