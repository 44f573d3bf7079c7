//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arrow `{0}` has no twist entry")]
    MissingTwistEntry(String),

    #[error("relation mixes word lengths: {0}")]
    InhomogeneousRelation(String),

    #[error("relation words are not parallel: {0}")]
    NonParallelRelation(String),

    #[error("algebra is not finite-dimensional within degree {0}: the ideal is not admissible")]
    NotAdmissible(usize),

    #[error("graded enumeration exceeded the configured degree budget {0}")]
    CutoffExceeded(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("module data does not respect the vertex block structure: {0}")]
    BlockInconsistency(String),

    #[error("not a complex: composite differential is nonzero at position {0}")]
    ComplexBroken(usize),

    #[error("connecting map is singular at step {0} (expected an isomorphism)")]
    SingularConnectingMap(usize),

    #[error("operation requires an empty relation set, but the model has relations")]
    HasRelations,

    #[error("unsupported twist rank: ({0}, {1}); only (1, 1) is implemented")]
    UnsupportedRank(usize, usize),

    #[error("matrices do not commute: {0}")]
    NotCommuting(String),

    #[error("parse error: {0}")]
    ParseError(String),

    #[error("schema violation: {0}")]
    SchemaViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
