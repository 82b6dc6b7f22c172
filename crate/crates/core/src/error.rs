use thiserror::Error;

/// Errors raised by model construction, asymptotic estimation and quadrature.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("x = {x} is outside the domain (support starts at {support_low})")]
    Domain { x: f64, support_low: f64 },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("degenerate ratio estimates: {0}")]
    DegenerateRatio(String),

    #[error("potter fit failed: {0}")]
    FitFailed(String),

    #[error("quadrature did not reach tolerance ({reason}); best estimate ln I = {log_estimate}, relative error {rel_error:e}")]
    QuadratureFailure {
        reason: String,
        log_estimate: f64,
        rel_error: f64,
    },

    #[error("exponent {exponent} exceeds the overflow guard at y = {at}")]
    OverflowGuard { exponent: f64, at: f64 },

    #[error("cannot parse family spec `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
