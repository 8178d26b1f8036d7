use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field has {got} values but the grid has {expected} cells")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("negative base {value} at cell {cell} with fractional exponent {exponent}")]
    NegativeBase {
        cell: usize,
        value: f64,
        exponent: f64,
    },

    #[error("nonpositive value {value} at cell {cell}")]
    Nonpositive { cell: usize, value: f64 },

    #[error("weight function is not positive on [0, {upper}]")]
    NonpositiveWeight { upper: f64 },

    #[error("conjugate gradient did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverDivergence { iterations: usize, residual: f64 },

    #[error("time step {dt:e} exceeds the transport limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("amplification at t = {t}: sup norm of u grew by a factor {factor:e}")]
    Amplification { t: f64, factor: f64 },

    #[error("no exponent in (0, 1) satisfies the sufficient smallness bound for v0max = {v0max}")]
    Infeasible { v0max: f64 },

    #[error("trajectory has no stored u snapshot at step {step}")]
    MissingSnapshots { step: usize },

    #[error("config line {line}: `{key}`: {reason}")]
    Config {
        line: usize,
        key: String,
        reason: String,
    },

    #[error("snapshot {path}: {reason}")]
    Snapshot { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
