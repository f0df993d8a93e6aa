use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bracket endpoints do not give values of strictly opposite sign")]
    Bracketing,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision mismatch: {left} bits against {right} bits")]
    PrecisionMismatch { left: u32, right: u32 },

    #[error("square root of a negative value")]
    NegativeSqrt,

    #[error("pole: {0}")]
    Pole(&'static str),

    /// A back node other than the last produced an exact zero; the closed-form
    /// outputs no longer apply and the full diagonalization must be used.
    #[error("zero output at back node {index}")]
    ZeroChild { index: usize },

    #[error("s = {s} is not adapted to lambda = {lambda}")]
    NotAdapted { s: String, lambda: String },

    #[error("degenerate parameter: {0}")]
    Degenerate(&'static str),

    #[error("orbit reaches 0 at step {step}")]
    NullSet { step: usize },

    #[error("matrix of order {n} exceeds the dense oracle cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("invalid bracket: {0}")]
    InvalidBracket(String),

    #[error("insufficient precision: at least {needed} digits are required")]
    Precision { needed: u32 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid run: {0}")]
    InvalidRun(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
