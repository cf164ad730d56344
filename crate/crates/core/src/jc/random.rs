//! Seeded random matrices, PVMs and map families.

use alloc::vec::Vec;

use nalgebra::{ComplexField, DVector};
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{block_map, hermitian_part, identity, op_norm, CMatrix, HermitianMap, Pvm, Tolerances, C};

pub type JcRng = ChaCha8Rng;

pub fn rng(seed: u64) -> JcRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut JcRng) -> C {
    C::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_unit_vector(d: usize, rng: &mut JcRng) -> DVector<C> {
    let v = DVector::from_fn(d, |_, _| gaussian(rng));
    let norm = v.norm();
    v.unscale(norm)
}

/// Unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary(d: usize, rng: &mut JcRng) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let z = r[(j, j)];
        let modulus = z.modulus();
        let phase = if modulus > 0.0 { z.unscale(modulus) } else { C::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_hermitian(d: usize, rng: &mut JcRng) -> CMatrix {
    hermitian_part(&CMatrix::from_fn(d, d, |_, _| gaussian(rng)))
}

/// Effect with uniformly drawn eigenvalues in a random eigenbasis.
pub fn random_effect(d: usize, rng: &mut JcRng) -> CMatrix {
    let u = random_unitary(d, rng);
    let diag = CMatrix::from_diagonal(&DVector::from_fn(d, |_, _| C::new(rng.random::<f64>(), 0.0)));
    hermitian_part(&(&u * diag * u.adjoint()))
}

/// Affine rescaling `(x + ‖x‖I) / 2‖x‖` of a Hermitian matrix into `[0, I]`.
pub fn effect_from_hermitian(x: &CMatrix) -> CMatrix {
    let d = x.nrows();
    let norm = op_norm(x);
    if norm == 0.0 {
        return identity(d).scale(0.5);
    }
    (x + identity(d).scale(norm)).unscale(2.0 * norm)
}

/// Random composition of `d` into `blocks` positive parts.
pub fn random_ranks(d: usize, blocks: usize, rng: &mut JcRng) -> Vec<usize> {
    let blocks = blocks.clamp(1, d.max(1));
    let mut cuts: Vec<usize> = (1..d).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(blocks - 1).collect();
    cuts.sort_unstable();
    let mut ranks = Vec::with_capacity(blocks);
    let mut last = 0;
    for c in cuts.into_iter().chain(core::iter::once(d)) {
        ranks.push(c - last);
        last = c;
    }
    ranks
}

/// Spectral projections of a random unitary grouped by the given ranks.
pub fn random_projections(d: usize, ranks: &[usize], rng: &mut JcRng) -> Vec<CMatrix> {
    let u = random_unitary(d, rng);
    let mut start = 0;
    ranks
        .iter()
        .map(|&r| {
            let cols = u.columns(start, r).into_owned();
            start += r;
            hermitian_part(&(&cols * cols.adjoint()))
        })
        .collect()
}

pub fn random_pvm(d: usize, blocks: usize, rng: &mut JcRng) -> Pvm {
    let ranks = random_ranks(d, blocks, rng);
    let projections = random_projections(d, &ranks, rng);
    Pvm::new(projections, &Tolerances { eps_eq: 1e-8, eps_psd: 1e-8 }).expect("spectral projections form a PVM")
}

/// Density of the given rank supported under the projection `q`, with
/// eigenvalues bounded away from zero.
pub fn random_density(q: &CMatrix, rank: usize, rng: &mut JcRng) -> CMatrix {
    let d = q.nrows();
    let (values, vectors) = super::eigh(q);
    let range: Vec<usize> = (0..d).filter(|&i| values[i] > 0.5).collect();
    let inner = random_unitary(range.len(), rng);
    let basis = CMatrix::from_fn(d, range.len(), |r, c| vectors[(r, range[c])]) * inner;
    let weights: Vec<f64> = (0..rank).map(|_| 0.2 + 0.8 * rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = CMatrix::zeros(d, d);
    for (k, w) in weights.iter().enumerate() {
        let v = basis.column(k);
        rho += (v * v.adjoint()).scale(w / total);
    }
    hermitian_part(&rho)
}

/// Ingredients of a block map, see [`block_map`].
#[derive(Debug, Clone)]
pub struct BlockMapSpec {
    pub pinched: Vec<CMatrix>,
    pub collapsed: Vec<(CMatrix, CMatrix)>,
}

impl BlockMapSpec {
    pub fn map(&self) -> HermitianMap {
        block_map(&self.pinched, &self.collapsed)
    }

    /// `Σ p_i + Σ supp(ρ_k)`, the support of the map.
    pub fn expected_support(&self) -> CMatrix {
        let d = self.pinched.first().or(self.collapsed.first().map(|(q, _)| q)).map_or(0, |m| m.nrows());
        let mut e = CMatrix::zeros(d, d);
        for p in &self.pinched {
            e += p;
        }
        for (_, rho) in &self.collapsed {
            let (values, vectors) = super::eigh(rho);
            for k in 0..d {
                if values[k] > 1e-6 {
                    let v = vectors.column(k);
                    e += v * v.adjoint();
                }
            }
        }
        e
    }
}

/// Random block map: each block of a random PVM is either pinched or
/// collapsed onto itself through a random density of random rank.
pub fn random_block_map(d: usize, rng: &mut JcRng) -> BlockMapSpec {
    let blocks = rng.random_range(1..=d);
    let ranks = random_ranks(d, blocks, rng);
    let projections = random_projections(d, &ranks, rng);
    let mut spec = BlockMapSpec {
        pinched: Vec::new(),
        collapsed: Vec::new(),
    };
    for (p, &r) in projections.into_iter().zip(&ranks) {
        if rng.random_bool(0.5) {
            spec.pinched.push(p);
        } else {
            let rank = rng.random_range(1..=r);
            let rho = random_density(&p, rank, rng);
            spec.collapsed.push((p, rho));
        }
    }
    spec
}

/// Random effect in the span of orthonormal coordinate columns that
/// contain the identity.
pub fn random_effect_in(domain: &super::RMatrix, d: usize, rng: &mut JcRng) -> CMatrix {
    let coeffs = DVector::from_fn(domain.ncols(), |_, _| rng.sample::<f64, _>(StandardNormal));
    effect_from_hermitian(&super::from_coords(&(domain * coeffs), d))
}

/// Irrational and rational scalars used for homogeneity checks.
pub fn scalars() -> [f64; 6] {
    [
        1.0 / 3.0,
        5.0 / 7.0,
        core::f64::consts::FRAC_1_SQRT_2,
        core::f64::consts::FRAC_PI_4,
        2.5,
        Float::sqrt(3.0),
    ]
}
