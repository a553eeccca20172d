//! Exact integer and rational algebra: matrices, polynomials, normal forms, lattices.

pub mod cyclotomic;
pub mod hnf;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod roots;

pub use cyclotomic::{cyclotomic, cyclotomic_factors, cyclotomic_part, euler_phi};
pub use hnf::{elementary_divisors, hnf, snf};
pub use lattice::{complete_to_unimodular, kernel_lattice, saturate, IntLattice};
pub use matrix::{Int, IntMatrix, Matrix, Rat, RatMatrix};
pub use poly::{charpoly, invariant_factors, IntPoly, RatPoly};
