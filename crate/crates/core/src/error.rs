use thiserror::Error;

use crate::algebra::AlgebraId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown algebra tag `{tag}` (valid tags: {valid})")]
    UnknownAlgebra { tag: String, valid: String },

    #[error("algebra mismatch: expected {expected}, found {found}")]
    AlgebraMismatch { expected: AlgebraId, found: AlgebraId },

    #[error("element has {found} coefficients but {algebra} has dimension {expected}")]
    DimensionMismatch {
        algebra: AlgebraId,
        expected: usize,
        found: usize,
    },

    #[error("{algebra} carries no root data")]
    NoRootData { algebra: AlgebraId },

    #[error("Cartan element is not regular: root `{root}` evaluates to {value:e}")]
    NotRegular { root: String, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid too small: {found} points, need at least {min}")]
    GridTooSmall { found: usize, min: usize },

    #[error("{0}")]
    Unsupported(String),

    #[error("blow-up at t = {t}: max norm {max_norm:e}")]
    BlowUp { t: f64, max_norm: f64 },

    #[error("insufficient snapshots: {found} given, need at least {min}")]
    InsufficientSnapshots { found: usize, min: usize },

    #[error("config error{}: field `{field}`: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        field: String,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
