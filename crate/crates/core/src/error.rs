use thiserror::Error;

use crate::multiindex::MultiIndex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{beta} is not componentwise below {alpha}")]
    NotBelow { beta: MultiIndex, alpha: MultiIndex },

    #[error("degree {degree} exceeds truncation {trunc}")]
    DegreeExceedsTruncation { degree: usize, trunc: usize },

    #[error("non-finite coefficient at {0}")]
    NonFinite(MultiIndex),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("certificate too weak at this tau: geometric ratio {ratio} >= 1")]
    CertificateTooWeak { ratio: f64 },

    #[error("certificate is not a pass verdict")]
    CertificateNotPass,

    #[error("truncation {have} insufficient for {what}; need at least {need}")]
    InsufficientTruncation {
        have: usize,
        need: usize,
        what: String,
    },

    #[error("black box has no value for monomials {}", format_missing(.0))]
    MissingMonomials(Vec<MultiIndex>),

    #[error("malformed input: {0}")]
    Parse(String),
}

fn format_missing(m: &[MultiIndex]) -> String {
    m.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
