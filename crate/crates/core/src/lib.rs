//! Exact triangularization of linear operators on finite- and
//! countably-infinite-dimensional vector spaces over `Q` and `F_p`.
//!
//! Operators are column-finite: every basis vector maps to a finitely
//! supported vector. Infinite operators are only ever probed through
//! finitely many columns, and every construction works on finite invariant
//! hulls obtained by saturation.

pub mod canonical;
pub mod centralizer;
pub mod error;
pub mod exactfield;
pub mod linspace;
pub mod operators;
pub mod oracle;
pub mod simtri;
pub mod triangulate;

pub use error::{Error, Result};
