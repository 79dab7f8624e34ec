use thiserror::Error;

use crate::lattice::CubeFamily;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error(
        "cube at {origin:?} with side {side} does not fit in a grid of {cells} cells per axis"
    )]
    CubeOutOfBounds {
        origin: [usize; 2],
        side: usize,
        cells: usize,
    },

    #[error("cell {cell} is outside a grid with {count} cells")]
    CellOutOfBounds { cell: usize, count: usize },

    #[error("cube family {family:?} is not supported in dimension {dim}")]
    UnsupportedFamily { family: CubeFamily, dim: usize },

    #[error("non-finite value at cell {cell}")]
    NonFinite { cell: usize },

    #[error("negative value {value} at cell {cell}")]
    Negative { cell: usize, value: f64 },

    #[error("weights must be strictly positive; got {value} at cell {cell}")]
    NonPositiveWeight { cell: usize, value: f64 },

    #[error(
        "|x|^{exponent} is not locally integrable in dimension {dim} (need exponent > -{dim})"
    )]
    NonIntegrable { exponent: f64, dim: usize },

    #[error("sampled functions live on different grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel evaluated at a singular configuration (all points coincide with the target)")]
    SingularKernel,

    #[error("work guard exceeded for {what}: requires {required} operations, budget is {budget}")]
    Guard {
        what: String,
        required: u128,
        budget: u128,
    },

    #[error("evaluation budget exceeded: {required} evaluations required, budget is {budget}")]
    Budget { required: usize, budget: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
