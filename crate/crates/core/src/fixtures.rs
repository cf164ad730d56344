//! Small named algebras used throughout the tests, the CLI and the suite.
//!
//! Element numbering:
//! - `chain(k)`: `i` stands for `i/k`.
//! - diamond: `0, a, b, 1` as bitmasks `00, 01, 10, 11`.
//! - MO2: `0, a, a⊥, b, b⊥, 1`.
//! - Ł3 × Ł3: `(x, y)` with `x, y ∈ {0, ½, 1}` is `3·(2x) + 2y`.

use alloc::vec;
use alloc::vec::Vec;

use crate::effect::{EffectAlgebra, FiniteEffectAlgebra};
use crate::mv::{mv_to_effect_algebra, MvAlgebra};

/// Łukasiewicz chain with `k + 1` elements as an effect algebra.
pub fn chain_table(k: usize) -> FiniteEffectAlgebra {
    FiniteEffectAlgebra::from_fn(k + 1, 0, k, |a, b| (a + b <= k).then_some(a + b))
        .expect("chain table is well formed")
}

pub fn diamond_table() -> FiniteEffectAlgebra {
    FiniteEffectAlgebra::from_fn(4, 0, 3, |a, b| (a & b == 0).then_some(a | b))
        .expect("diamond table is well formed")
}

pub fn mo2_table() -> FiniteEffectAlgebra {
    FiniteEffectAlgebra::from_fn(6, 0, 5, |a, b| match (a, b) {
        (0, x) | (x, 0) => Some(x),
        (1, 2) | (2, 1) | (3, 4) | (4, 3) => Some(5),
        _ => None,
    })
    .expect("MO2 table is well formed")
}

fn valid(table: FiniteEffectAlgebra) -> EffectAlgebra {
    EffectAlgebra::new(table).expect("bundled fixture is an effect algebra")
}

pub fn chain2() -> EffectAlgebra {
    valid(chain_table(1))
}

pub fn chain3() -> EffectAlgebra {
    valid(chain_table(2))
}

pub fn diamond() -> EffectAlgebra {
    valid(diamond_table())
}

pub fn mo2() -> EffectAlgebra {
    valid(mo2_table())
}

pub fn luk3() -> MvAlgebra {
    MvAlgebra::chain(2)
}

pub fn luk3_squared() -> MvAlgebra {
    MvAlgebra::product(&luk3(), &luk3())
}

pub fn luk3_squared_effect() -> EffectAlgebra {
    mv_to_effect_algebra(&luk3_squared()).expect("product of chains is MV")
}

/// A named effect algebra fixture.
pub struct Fixture {
    pub name: &'static str,
    pub algebra: EffectAlgebra,
    pub mv: Option<MvAlgebra>,
}

/// Every bundled effect algebra; `mv` is set when the algebra came from an
/// MV table or is an MV-effect algebra with a known MV form.
pub fn all() -> Vec<Fixture> {
    let mv_of = |a: &EffectAlgebra| crate::mv::effect_algebra_to_mv(a).ok();
    let chain2 = chain2();
    let chain3 = chain3();
    let diamond = diamond();
    vec![
        Fixture { name: "chain2", mv: mv_of(&chain2), algebra: chain2 },
        Fixture { name: "chain3", mv: mv_of(&chain3), algebra: chain3 },
        Fixture { name: "diamond", mv: mv_of(&diamond), algebra: diamond },
        Fixture { name: "mo2", mv: None, algebra: mo2() },
        Fixture { name: "luk3", mv: Some(luk3()), algebra: mv_to_effect_algebra(&luk3()).expect("MV") },
        Fixture { name: "luk3xluk3", mv: Some(luk3_squared()), algebra: luk3_squared_effect() },
    ]
}
