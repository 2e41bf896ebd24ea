//! Invariant hulls, primary decomposition, kernel filtrations and the
//! construction and verification of triangularizing ordered bases.

mod basis;
mod primary;
mod probes;
mod saturate;

pub use basis::{
    dependency_downset, matrix_in_basis, triangularize, triangularize_hull, verify_triangular,
    NonTriangularWitness, OrderIndex, OrderedBasis, TriangularCertificate, TriangularCheck,
    TriangularityWitness, TriangularizabilityVerdict,
};
pub use primary::{
    is_diagonalizable_locally, kernel_filtration, local_min_poly, primary_components,
    PrimaryComponent,
};
pub(crate) use primary::matrix_primary_components;
pub use probes::{
    closure_test, invertibility_report, is_topologically_nilpotent, ClosureVerdict,
    InvertibilityReport, NilpotenceVerdict, NilpotenceWitness,
};
pub use saturate::{saturate, saturate_vectors, Saturation, SaturationTrace, DEFAULT_FUEL};
