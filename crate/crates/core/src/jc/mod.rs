//! Hermitian matrix effects `[0, I]` and linear maps on them.
//!
//! Linear maps on the real space of Hermitian `d × d` matrices are stored as
//! `d² × d²` real matrices over the orthonormal basis
//! `{E_ii} ∪ {(E_ij + E_ji)/√2} ∪ {i(E_ij − E_ji)/√2}` (`i < j`), so that
//! composition is matrix multiplication and the adjoint is the transpose.

use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use num_traits::Float;

mod checks;
pub mod random;
mod support;

pub use checks::*;
pub use support::*;

pub type C = Complex<f64>;
pub type CMatrix = DMatrix<C>;
pub type RMatrix = DMatrix<f64>;

/// Numerical tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute tolerance for matrix equality in operator norm.
    pub eps_eq: f64,
    /// Slack allowed below zero for smallest eigenvalues.
    pub eps_psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_eq: 1e-9,
            eps_psd: 1e-9,
        }
    }
}

impl Tolerances {
    /// Singular values below this are treated as zero when computing ranks.
    pub fn rank(&self) -> f64 {
        Float::sqrt(self.eps_eq).max(1e-12)
    }

    /// Tolerance for quantities assembled from several decompositions,
    /// such as subspace projectors and composed maps.
    pub fn subspace(&self) -> f64 {
        10.0 * self.eps_eq
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JcError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("spectrum [{min}, {max}] is not within [0, 1]")]
    NotEffect { min: f64, max: f64 },
    #[error("invalid PVM: {0}")]
    InvalidPvm(PvmDefect),
    #[error("map is not a state operator")]
    NotStateOperator(StateOperatorCheck),
    #[error("numerical inconsistency: {0}")]
    Inconsistent(&'static str),
    #[error("support certification failed: {0}")]
    Support(SupportDefect),
    #[error("projection is not the support of the map")]
    NotSupport,
    #[error("decomposition failed: {0}")]
    Decomposition(DecompositionClause),
    #[error("extension rejected: {0}")]
    Extension(ExtensionDefect),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PvmDefect {
    #[error("empty family")]
    Empty,
    #[error("element {0} is not a projection")]
    NotProjection(usize),
    #[error("elements {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("elements do not sum to the identity")]
    NotComplete,
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn adjoint(x: &CMatrix) -> CMatrix {
    x.adjoint()
}

pub fn hermitian_part(x: &CMatrix) -> CMatrix {
    (x + x.adjoint()).scale(0.5)
}

pub fn real_matrix(re: &RMatrix) -> CMatrix {
    re.map(|v| C::new(v, 0.0))
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `x`.
pub fn eigh(x: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(x));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = CMatrix::from_fn(x.nrows(), n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn min_eigenvalue(x: &CMatrix) -> f64 {
    let (values, _) = eigh(x);
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue(x: &CMatrix) -> f64 {
    let (values, _) = eigh(x);
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Operator (spectral) norm.
pub fn op_norm(x: &CMatrix) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    Float::sqrt(max_eigenvalue(&(x.adjoint() * x)).max(0.0))
}

pub fn distance(a: &CMatrix, b: &CMatrix) -> f64 {
    op_norm(&(a - b))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

fn check_dims(a: &CMatrix, b: &CMatrix) -> Result<(), JcError> {
    if !a.is_square() || !b.is_square() {
        return Err(JcError::NotSquare);
    }
    if a.nrows() != b.nrows() {
        return Err(JcError::DimMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(())
}

/// `a ∘ b = ½(ab + ba)`
pub fn jordan_product(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, JcError> {
    check_dims(a, b)?;
    Ok(jordan(a, b))
}

/// `{abc} = ½(abc + cba)`
pub fn triple_product(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<CMatrix, JcError> {
    check_dims(a, b)?;
    check_dims(a, c)?;
    Ok(triple(a, b, c))
}

pub(crate) fn jordan(a: &CMatrix, b: &CMatrix) -> CMatrix {
    (a * b + b * a).scale(0.5)
}

pub(crate) fn triple(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> CMatrix {
    (a * b * c + c * b * a).scale(0.5)
}

/// Hermitian `d × d` matrix with spectrum in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEffect {
    matrix: CMatrix,
}

impl HermitianEffect {
    pub fn new(matrix: CMatrix, tol: &Tolerances) -> Result<Self, JcError> {
        if !matrix.is_square() {
            return Err(JcError::NotSquare);
        }
        let deviation = op_norm(&(&matrix - matrix.adjoint()));
        if deviation > tol.eps_eq {
            return Err(JcError::NotHermitian(deviation));
        }
        let (values, _) = eigh(&matrix);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if min < -tol.eps_psd || max > 1.0 + tol.eps_psd {
            return Err(JcError::NotEffect { min, max });
        }
        Ok(Self {
            matrix: hermitian_part(&matrix),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Projection-valued measure: orthogonal projections summing to `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pvm {
    projections: Vec<CMatrix>,
}

impl Pvm {
    pub fn new(projections: Vec<CMatrix>, tol: &Tolerances) -> Result<Self, JcError> {
        let Some(first) = projections.first() else {
            return Err(JcError::InvalidPvm(PvmDefect::Empty));
        };
        let d = first.nrows();
        let mut total = CMatrix::zeros(d, d);
        for (i, p) in projections.iter().enumerate() {
            if !p.is_square() {
                return Err(JcError::NotSquare);
            }
            if p.nrows() != d {
                return Err(JcError::DimMismatch {
                    expected: d,
                    found: p.nrows(),
                });
            }
            if distance(p, &p.adjoint()) > tol.eps_eq || distance(&(p * p), p) > tol.eps_eq {
                return Err(JcError::InvalidPvm(PvmDefect::NotProjection(i)));
            }
            for (j, q) in projections.iter().enumerate().skip(i + 1) {
                if q.nrows() == d && op_norm(&(p * q)) > tol.eps_eq {
                    return Err(JcError::InvalidPvm(PvmDefect::NotOrthogonal(i, j)));
                }
            }
            total += p;
        }
        if distance(&total, &identity(d)) > tol.eps_eq {
            return Err(JcError::InvalidPvm(PvmDefect::NotComplete));
        }
        Ok(Self { projections })
    }

    pub fn dim(&self) -> usize {
        self.projections[0].nrows()
    }

    pub fn projections(&self) -> &[CMatrix] {
        &self.projections
    }

    /// `‖[x, p_i]‖` maximised over the family.
    pub fn commutant_defect(&self, x: &CMatrix) -> f64 {
        self.projections
            .iter()
            .map(|p| op_norm(&commutator(p, x)))
            .fold(0.0, f64::max)
    }
}

/// The orthonormal Hermitian basis used for map representations.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let r = core::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(i, i)] = C::new(1.0, 0.0);
        basis.push(m);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(i, j)] = C::new(r, 0.0);
            m[(j, i)] = C::new(r, 0.0);
            basis.push(m);
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(i, j)] = C::new(0.0, r);
            m[(j, i)] = C::new(0.0, -r);
            basis.push(m);
        }
    }
    basis
}

/// Coordinates `tr(B_k x)` of the Hermitian part of `x`.
pub fn coords(x: &CMatrix) -> DVector<f64> {
    let d = x.nrows();
    let s = core::f64::consts::SQRT_2;
    let mut v = DVector::zeros(d * d);
    let mut k = 0;
    for i in 0..d {
        v[k] = x[(i, i)].re;
        k += 1;
    }
    for i in 0..d {
        for j in i + 1..d {
            v[k] = s * 0.5 * (x[(i, j)].re + x[(j, i)].re);
            k += 1;
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            v[k] = s * 0.5 * (x[(i, j)].im - x[(j, i)].im);
            k += 1;
        }
    }
    v
}

pub fn from_coords(v: &DVector<f64>, d: usize) -> CMatrix {
    let r = core::f64::consts::FRAC_1_SQRT_2;
    let mut x = CMatrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        x[(i, i)] = C::new(v[k], 0.0);
        k += 1;
    }
    for i in 0..d {
        for j in i + 1..d {
            x[(i, j)] += C::new(r * v[k], 0.0);
            x[(j, i)] += C::new(r * v[k], 0.0);
            k += 1;
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            x[(i, j)] += C::new(0.0, r * v[k]);
            x[(j, i)] += C::new(0.0, -r * v[k]);
            k += 1;
        }
    }
    x
}

/// Real-linear map on Hermitian `d × d` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMap {
    dim: usize,
    matrix: RMatrix,
}

impl HermitianMap {
    pub fn new(dim: usize, matrix: RMatrix) -> Result<Self, JcError> {
        let n = dim * dim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(JcError::DimMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { dim, matrix })
    }

    /// Tabulates `f` on the Hermitian basis; `f` is assumed real-linear.
    pub fn from_fn(dim: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let basis = hermitian_basis(dim);
        let n = dim * dim;
        let mut matrix = RMatrix::zeros(n, n);
        for (k, b) in basis.iter().enumerate() {
            matrix.set_column(k, &coords(&f(b)));
        }
        Self { dim, matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: RMatrix::identity(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    /// Applies the map to the Hermitian part of `x`.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        from_coords(&(&self.matrix * coords(x)), self.dim)
    }

    /// Complex-linear extension to arbitrary matrices.
    pub fn apply_complex(&self, x: &CMatrix) -> CMatrix {
        let re = hermitian_part(x);
        let im = (x - x.adjoint()).map(|z| z * C::new(0.0, -0.5));
        self.apply(&re) + self.apply(&im).map(|z| z * C::new(0.0, 1.0))
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &HermitianMap) -> HermitianMap {
        HermitianMap {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// Adjoint with respect to the trace inner product.
    pub fn adjoint(&self) -> HermitianMap {
        HermitianMap {
            dim: self.dim,
            matrix: self.matrix.transpose(),
        }
    }

    /// Frobenius distance between representing matrices.
    pub fn distance(&self, other: &HermitianMap) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    /// `Σ_ij E_ij ⊗ m(E_ij)`, positive semidefinite iff the map is
    /// completely positive.
    pub fn choi_matrix(&self) -> CMatrix {
        let d = self.dim;
        let mut choi = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(i, j)] = C::new(1.0, 0.0);
                let image = self.apply_complex(&e);
                choi.view_mut((i * d, j * d), (d, d)).copy_from(&image);
            }
        }
        choi
    }

    /// `m*(I)`; `tr(m(x)) = tr(σ x)`.
    pub fn dual_unit(&self) -> CMatrix {
        from_coords(&(self.matrix.transpose() * coords(&identity(self.dim))), self.dim)
    }
}

/// `τ(a) = Σ p_i a p_i`
pub fn luders_operator(pvm: &Pvm) -> HermitianMap {
    HermitianMap::from_fn(pvm.dim(), |x| {
        pvm.projections()
            .iter()
            .fold(CMatrix::zeros(x.nrows(), x.ncols()), |acc, p| acc + p * x * p)
    })
}

/// `x ↦ ⟨v|x|v⟩ I` for a unit vector `v`.
pub fn vector_state_operator(v: &DVector<C>) -> HermitianMap {
    let d = v.len();
    HermitianMap::from_fn(d, |x| identity(d).scale((v.adjoint() * x * v)[(0, 0)].re))
}

/// `x ↦ U diag(T · diag(U* x U)) U*` for a row-stochastic idempotent `T`.
pub fn rotated_diagonal_map(t: &RMatrix, u: &CMatrix) -> HermitianMap {
    let d = t.nrows();
    HermitianMap::from_fn(d, |x| {
        let rotated = u.adjoint() * x * u;
        let diag = DVector::from_iterator(d, (0..d).map(|i| rotated[(i, i)].re));
        let image = t * diag;
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            out[(i, i)] = C::new(image[i], 0.0);
        }
        u * out * u.adjoint()
    })
}

/// `x ↦ Σ_i p_i x p_i + Σ_k tr(ρ_k q_k x q_k) q_k` for a PVM `{p_i} ∪ {q_k}`
/// and densities `ρ_k` supported under `q_k`.
pub fn block_map(pinched: &[CMatrix], collapsed: &[(CMatrix, CMatrix)]) -> HermitianMap {
    let d = pinched
        .first()
        .or(collapsed.first().map(|(q, _)| q))
        .map_or(0, |m| m.nrows());
    HermitianMap::from_fn(d, |x| {
        let mut out = CMatrix::zeros(d, d);
        for p in pinched {
            out += p * x * p;
        }
        for (q, rho) in collapsed {
            out += q.scale((rho * q * x * q).trace().re);
        }
        out
    })
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn real_range(m: &RMatrix, rank_tol: f64) -> RMatrix {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m * m.transpose());
    let keep: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i] > rank_tol * rank_tol)
        .collect();
    RMatrix::from_fn(n, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])])
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn real_null_space(m: &RMatrix, rank_tol: f64) -> RMatrix {
    let n = m.ncols();
    let gram = m.transpose() * m;
    let eig = SymmetricEigen::new(gram);
    let keep: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i] <= rank_tol * rank_tol)
        .collect();
    RMatrix::from_fn(n, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])])
}

/// Null space of a symmetric positive semidefinite form.
pub fn psd_null_space(g: &RMatrix, rank_tol: f64) -> RMatrix {
    let n = g.ncols();
    let eig = SymmetricEigen::new(g.clone());
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] <= rank_tol).collect();
    RMatrix::from_fn(n, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])])
}

/// Orthogonal projector onto the span of orthonormal columns.
pub fn column_projector(q: &RMatrix) -> RMatrix {
    q * q.transpose()
}
