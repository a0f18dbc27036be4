//! Dynamics of linear and nilpotent automorphisms over the local fields
//! Q_p and F_q((X)): eigenvalue absolute values, adapted norms, the scale,
//! tidy balls, and the finite-quotient oracles that cross-check them.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bch;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod localfield;
pub mod newton;
pub mod poly;
pub mod samples;
pub mod scaletidy;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{Lattice, Matrix, OracleMode};
pub use localfield::{AbsValue, Element, FieldKind, FieldSpec, Rational, ResidueField};
pub use poly::Poly;
