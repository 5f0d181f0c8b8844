use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element {element}: degenerate geometry ({reason})")]
    DegenerateGeometry { element: usize, reason: String },

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("structure is disconnected: {0}")]
    Disconnected(String),

    #[error("mass matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parameter {index} = {value:e} outside prior bounds [{lower:e}, {upper:e}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("likelihood evaluation failed for initial live point {index}: {source}")]
    Initialization {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("likelihood plateau: no replacement beat log L = {log_likelihood} after {proposals} proposals")]
    Plateau { log_likelihood: f64, proposals: usize },

    #[error("grid quadrature supports at most 2 dimensions, got {0}")]
    Dimensionality(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
