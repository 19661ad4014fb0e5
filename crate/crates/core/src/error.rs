use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("index {index:?} is out of bounds for shape {shape:?}")]
    IndexOutOfBounds { index: Vec<usize>, shape: Vec<usize> },
    #[error("mode {mode} is out of range for an order {order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("vector {0} of an outer product is zero")]
    ZeroVector(usize),
    #[error("index subset for mode {0} is empty")]
    EmptySubset(usize),
    #[error("tensor must be cubical (all dimensions equal), got shape {0:?}")]
    NotCubical(Vec<usize>),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("magnitude range [{lo}, {hi}] must satisfy 0 < lo <= hi")]
    EmptyRange { lo: f64, hi: f64 },
    #[error("duplicate index {0:?}")]
    DuplicateIndex(Vec<usize>),
    #[error("parse error: {0}")]
    Parse(String),
}
