//! Exact linear algebra at fixed precision: determinants, characteristic
//! polynomials, kernels, and lattices with their indices.

mod lattice;
mod matrix;

pub use lattice::{IndexReport, Lattice, OracleMode, ENUMERATION_LIMIT};
pub use matrix::{is_negligible_vec, min_valuation, vec_add, vec_scale, vec_shift, vec_sub, Matrix};
