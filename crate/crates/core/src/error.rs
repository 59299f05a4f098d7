use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),
    #[error("degree i = {i} out of range for n = {n}")]
    DegreeOutOfRange { n: usize, i: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector is not a unit vector (norm {0})")]
    NotUnit(f64),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("capability missing: {0}")]
    Capability(String),
    #[error("origin not interior (support value {0})")]
    OriginNotInterior(f64),
    #[error("degenerate body: {0}")]
    Degenerate(String),
    #[error("profile is not the support function of a convex body (violation {0:e})")]
    NotSupportFunction(f64),
    #[error("degree-1 component must vanish (found {0:e})")]
    NonzeroLinearPart(f64),
    #[error("non-integrable profile: {0}")]
    NonIntegrable(String),
    #[error("specification refused: {0}")]
    Refused(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
