use thiserror::Error;

/// Errors raised by the quantization toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shift {shift} does not fit inside a window of half-width {half_width}")]
    DomainTooSmall { shift: f64, half_width: f64 },

    #[error("non-finite sample at ({q}, {p})")]
    NonFinite { q: f64, p: f64 },

    #[error("unsupported Hermite order {0} (maximum is 64)")]
    UnsupportedOrder(usize),

    #[error(
        "power iteration did not converge after {iterations} iterations (last estimate {last})"
    )]
    Convergence { iterations: usize, last: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{0} requires a single degree of freedom")]
    RequiresOneDof(&'static str),

    #[error("grid must be symmetric about 0 (center = {0})")]
    AsymmetricGrid(f64),

    #[error("point q = {q} leaves the admissible window |q| < {limit}")]
    WindowViolation { q: f64, limit: f64 },

    #[error("symbol round trip residual {residual:e} exceeds tolerance {tolerance:e}")]
    RoundTrip { residual: f64, tolerance: f64 },

    #[error("theta mismatch: {left} vs {right}")]
    ThetaMismatch { left: f64, right: f64 },

    #[error("mu mismatch: {left} vs {right}")]
    MuMismatch { left: f64, right: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("truncation overflow: tail norm {tail:e} above {tolerance:e} at order {order}")]
    TruncationOverflow {
        tail: f64,
        tolerance: f64,
        order: usize,
    },

    #[error("window too small: tail estimate {tail:e} above {tolerance:e}")]
    WindowTooSmall { tail: f64, tolerance: f64 },

    #[error("grid half-width {half_width} is not commensurate with 2π")]
    NotCommensurate { half_width: f64 },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("not a representation: {0}")]
    InvalidRepresentation(String),

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
