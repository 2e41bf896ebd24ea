//! Exact scalars over `Q` and `F_p`, and univariate polynomials with the
//! gcd, Bezout and linear-splitting machinery used by the decompositions.

mod poly;
mod roots;
mod scalar;

pub use poly::{bezout_family, poly_ext_gcd, poly_gcd, poly_lcm, squarefree_part, Poly};
pub use roots::{expand_roots, split_linear, SplitFailure, SplitResult, MAX_EXHAUSTIVE_PRIME};
pub use scalar::{FieldSpec, Scalar};

pub(crate) use roots::splitmix64;
