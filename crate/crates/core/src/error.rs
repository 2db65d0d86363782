use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse `{0}` as a rational number")]
    Parse(String),

    #[error("malformed interval: lo {lo} > hi {hi}")]
    MalformedInterval { lo: Box<Scalar>, hi: Box<Scalar> },

    #[error("interval set is not contained in the hull [{lo}, {hi}]")]
    NotInHull { lo: Box<Scalar>, hi: Box<Scalar> },

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(Scalar),

    #[error("{0}: interval must lie in [0, +inf)")]
    NegativeDomain(&'static str),

    #[error("{0}: interval touches zero")]
    TouchesZero(&'static str),

    #[error("lambda must satisfy 0 < lambda < 1/2, got {0}")]
    LambdaOutOfRange(Scalar),

    #[error("merge lemma hypothesis unmet: lambda = {0} < 1/3")]
    MergeHypothesisUnmet(Scalar),

    #[error("k must be non-negative, got {0}")]
    NegativeK(Scalar),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
