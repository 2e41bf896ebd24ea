//! Finitely supported vectors over a countable basis, echelon subspace
//! bases, kernels, quotients and direct-sum checks.

mod matrix;
mod sparse;
mod subspace;

pub use matrix::{kernel_basis, Matrix};
pub use sparse::{coordinate_projection, BasisIndex, Domain, SparseVec};
pub use subspace::{
    direct_sum_check, quotient_coordinates, rref_insert, CoordinateSystem, FlagChain,
    QuotientSpace, SubspaceBasis,
};
