use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("probe point ({x}, {y}) coincides with antenna element {element}")]
    CoincidentPoint { x: f64, y: f64, element: usize },

    #[error("channel vector is zero; matched filter undefined")]
    ZeroChannel,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("beams {0} and {1} peak at the same angle")]
    DuplicatePeak(usize, usize),

    #[error("arc of beam {0} contains no circle sample")]
    EmptyArc(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
