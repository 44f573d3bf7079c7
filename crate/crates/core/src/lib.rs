//! quext — exact Hom and Ext computations for representations of finite
//! quivers with relations.
//!
//! The library builds the finite-dimensional algebra Λ = kQ/K from a quiver,
//! an optional arrow twist and a homogeneous relation ideal, and computes
//! Ext groups of Λ-modules two independent ways: through an explicit
//! injective coresolution assembled from the graded slices K^p/K^{p+1}, and
//! through minimal projective resolutions. All arithmetic is exact, over the
//! rationals or a prime field.

pub mod algebra;
pub mod error;
pub mod field;
pub mod linalg;
pub mod quiver;
pub mod oracle;
pub mod rep;

pub use error::{Error, Result};
