use thiserror::Error;

/// Errors produced by the actuator-design library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Every construction here needs at least two states.
    #[error("unsupported dimension n = {0}; at least 2 states are required")]
    UnsupportedDimension(usize),

    #[error("pair (A, b) is not controllable: Kalman rank {rank} < {n}")]
    NonControllable { rank: usize, n: usize },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("Gramian is numerically singular (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("numeric range exceeded: {0}")]
    NumericRange(String),

    /// Vector too short to normalize; the caller should draw a fresh direction.
    #[error("vector norm below {0:e}; resample direction")]
    Resample(f64),

    #[error("no controllable direction: every sampled actuator gives a zero objective")]
    NoControllableDirection,

    #[error("symmetry candidate {index} rejected: {reason}")]
    InvalidSymmetry { index: usize, reason: String },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
