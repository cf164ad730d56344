#![no_std]
//! Finite effect algebras, MV-algebras, state operators, and conditional
//! expectations on matrix and commutative algebras.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod effect;
pub mod commutative;
pub mod fixtures;
pub mod jc;
pub mod mv;
pub mod rational;
pub mod state_ops;
