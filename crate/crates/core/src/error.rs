use thiserror::Error;

use crate::sdp::SdpSolution;

/// Errors produced by the channel model, solvers and power allocation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The composite channel vanishes, so no finite transmit power meets the target.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The SDP solver hit its iteration limit; the best iterate is attached.
    #[error("SDP solver did not converge (residual {residual:e} after {iterations} iterations)")]
    SdpNotConverged {
        best: Box<SdpSolution>,
        residual: f64,
        iterations: usize,
    },

    #[error("enumeration budget exceeded: {required} evaluations > limit {limit}")]
    BudgetExceeded { required: u128, limit: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
