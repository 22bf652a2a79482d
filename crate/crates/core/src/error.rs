use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate frame: zero-lag autocorrelation {r0} is not positive")]
    DegenerateFrame { r0: f64 },
    #[error("non-finite sample at index {index} (recursion became unstable)")]
    Unstable { index: usize },
    #[error("root finding did not converge after {iterations} iterations (residual {residual:e})")]
    RootFinding { iterations: usize, residual: f64 },
    #[error("oracle refused: dimension {dim} exceeds the guard of {limit}")]
    OracleTooLarge { dim: usize, limit: usize },
    #[error("zero-power noise cannot be scaled to a target SNR")]
    ZeroPowerNoise,
    #[error("utterance is empty after silence trimming")]
    EmptyUtterance,
    #[error("not enough signal: {frames} analysis frames after silence removal, need {needed}")]
    InsufficientSignal { frames: usize, needed: usize },
    #[error("non-finite loss (mel {mel}, wave {wave}, lp {lp})")]
    NonFiniteLoss { mel: f64, wave: f64, lp: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
