use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The closed form is undefined for this sign/parameter regime.
    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("invalid initial state: {0}")]
    InvalidState(String),

    /// `exp(z^2)` is not representable for the requested argument.
    #[error("erfcx overflow at z = {re} + {im}i")]
    OverflowDomain { re: f64, im: f64 },

    #[error("solver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("adaptive step size {dt:e} s fell below the minimum at t = {t:e} s")]
    StepSizeUnderflow { t: f64, dt: f64 },

    #[error("photon count threshold never reached during the trace")]
    NotReached,

    #[error("linear response is invalid at lambda/lambda_c = {0} (must be < 1)")]
    AboveThreshold(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
