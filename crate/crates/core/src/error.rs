use thiserror::Error;

use crate::norms::NormResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `Tr A` vanishes (or `|Tr A| = 1` for the order index), so the
    /// normalization denominator is zero.
    #[error("degenerate trace: |Tr A| = {trace_abs:e}")]
    DegenerateTrace { trace_abs: f64 },

    #[error("zero norm: {which} = {value:e}")]
    ZeroNorm { which: &'static str, value: f64 },

    /// No optimizer restart met the convergence tolerance. The best value
    /// found is still available.
    #[error("no restart converged (best value {:e})", .best.value)]
    NonConvergence { best: Box<NormResult> },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
