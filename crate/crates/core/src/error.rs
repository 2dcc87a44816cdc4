use thiserror::Error;

/// Errors surfaced by the library. Computational routines are total on
/// well-formed inputs; everything here is a precondition or I/O failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent p = {p}: require p >= 1")]
    InvalidExponent { p: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("window [{n_lo}, {n_hi}] too short: {needed}")]
    InsufficientWindow { n_lo: i64, n_hi: i64, needed: String },

    #[error("shift {tau} is not aligned to the grid with m = {m} samples per unit")]
    Misaligned { tau: f64, m: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation failed at t = {t} (cell {cell}): {detail}")]
    Evaluation { t: f64, cell: usize, detail: String },

    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("map metadata missing: {0}")]
    Unconfigured(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
