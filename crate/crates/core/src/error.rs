use thiserror::Error;

/// Failures raised by the numerical layers.
///
/// Values that would be expensive to format eagerly are carried as short
/// decimal strings so the error stays cheap to clone and print.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum QError {
    #[error("q must lie strictly between 0 and 1 (got {0})")]
    InvalidQ(String),
    #[error("precision must be at least {min} bits (got {got})")]
    InvalidPrecision { got: u32, min: u32 },
    #[error("truncation tolerance must lie strictly between 0 and 1 (got {0})")]
    InvalidTolerance(String),
    #[error("product base {0} is outside (0, 1); the infinite product diverges")]
    DivergentProduct(String),
    #[error("lattice sum tail {tail} exceeds the truncation tolerance relative to {scale}")]
    TailBound { tail: String, scale: String },
    #[error("{what}: point {point} lies within {radius} of a singular point")]
    PoleProximity {
        what: &'static str,
        point: String,
        radius: String,
    },
    #[error("the q-derivative is undefined at x = 0")]
    ZeroPoint,
    #[error("series {kind} does not converge at |z| = {radius}")]
    Divergent { kind: String, radius: String },
    #[error("vanishing denominator in the {kind} recurrence at index {index}")]
    VanishingDenominator { kind: String, index: usize },
    #[error("{what}: 2x2 connection system is ill-conditioned (condition number {cond})")]
    IllConditioned { what: &'static str, cond: String },
    #[error("norm gamma_{0} is not positive; precision is insufficient")]
    LossOfPositivity(usize),
    #[error("{what} did not stabilize (last change {change})")]
    NonConvergence { what: &'static str, change: String },
    #[error("degree {0} must be even")]
    OddDegree(usize),
    #[error("shift c = {0} must be positive")]
    InvalidShift(String),
    #[error("degree {n} exceeds the constructed maximum {max}")]
    DegreeOutOfRange { n: usize, max: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, QError>;
