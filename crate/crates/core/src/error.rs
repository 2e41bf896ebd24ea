use thiserror::Error;

use crate::exactfield::{FieldSpec, Poly};
use crate::linspace::{Domain, SparseVec};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported range (< 2^32)")]
    ModulusTooLarge(u64),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("index domain mismatch: {0} vs {1}")]
    DomainMismatch(Domain, Domain),
    #[error("index {position} is outside the domain {domain}")]
    IndexOutOfDomain { domain: Domain, position: i64 },
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("polynomial must be nonconstant")]
    ConstantPolynomial,
    #[error("polynomials {left} and {right} are not coprime (gcd {gcd})")]
    NotCoprime { left: Poly, right: Poly, gcd: Poly },
    #[error("root search over F_{0} is limited to p <= 65536")]
    FieldTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("column {0} is not defined by this column map")]
    UndefinedColumn(i64),
    #[error("{0}")]
    InvalidOperator(String),
    #[error("subspace is not invariant: image of {witness} escapes")]
    NotInvariant { witness: SparseVec, image: SparseVec },
    #[error("vector is not in the given subspace")]
    NotInSubspace(SparseVec),
    #[error("subspace is not contained in the ambient subspace")]
    NotContained,
    #[error("zero-dimensional hull")]
    ZeroHull,
    #[error("matrix is not nilpotent")]
    NotNilpotent(Vec<crate::exactfield::Scalar>),
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("polynomial {0} does not annihilate the hull")]
    NotAnnihilating(Poly),
    #[error("family does not commute on probe")]
    NonCommuting(Box<crate::simtri::CommutationWitness>),
    #[error("minimal polynomial does not split: {}", .0.factor)]
    Split(crate::exactfield::SplitFailure),
    #[error("exhaustive domain too large: {0}")]
    DomainTooLarge(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}
