use thiserror::Error;

/// Errors shared across the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("tree size {n} outside the supported range 1..={max}")]
    SizeRange { n: usize, max: usize },

    #[error("weight index {k} exceeds the materialized maximum {max}")]
    WeightRange { k: usize, max: usize },

    #[error("no coefficient at index {index}: series is truncated at order {order}")]
    CoefficientRange { index: usize, order: usize },

    #[error("cannot differentiate a series of order 0")]
    EmptyOrder,

    #[error("composition needs a zero constant term, found {value}")]
    CompositionDomain { value: String },

    #[error("covariance lag {lag} not covered (maximum lag {max})")]
    CovarianceLag { lag: usize, max: usize },

    #[error("covariance matrix is not positive semi-definite: leading minor of order {order} fails")]
    NotPositiveSemiDefinite { order: usize },

    #[error("invalid diagonal law: {0}")]
    InvalidLaw(String),

    #[error("invalid Dyck path: {0}")]
    InvalidDyckPath(String),

    #[error("invalid involution: {0}")]
    InvalidInvolution(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal identity violated: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
