use thiserror::Error;

use crate::ld::ValidationFailure;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("capacity argument out of domain: 1 + x must be positive, got x = {0}")]
    Domain(f64),

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("(alpha, gamma) = ({alpha}, {gamma}) outside 1 < alpha < gamma")]
    OutOfScope { alpha: f64, gamma: f64 },

    #[error("empty sweep range [{start}, {end}] with step {step}")]
    EmptyRange { start: f64, end: f64, step: f64 },

    #[error("level {level} out of range for vector length {q}")]
    LevelOutOfRange { level: usize, q: usize },

    #[error("vector length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("invalid allocation: {0}")]
    InvalidAllocation(ValidationFailure),

    #[error("{node} power budget exceeded: {used} > {budget}")]
    BudgetViolation {
        node: &'static str,
        used: f64,
        budget: f64,
    },

    #[error("slope estimate needs at least two SNR points, got {0}")]
    TooFewSnrPoints(usize),

    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
