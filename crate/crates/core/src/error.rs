use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("states are not compressive: (p+ - p-)(v+ - v-) = {product:e} must be negative")]
    NonCompressive { product: f64 },

    #[error("v_minus = {v_minus} exceeds v(right) = {v_right}")]
    InvalidOrdering { v_minus: f64, v_right: f64 },

    #[error("Rankine-Hugoniot Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("no shock of strength {target} on the Hugoniot locus for v_minus in ({lo}, {hi}]")]
    StrengthUnreachable { target: f64, lo: f64, hi: f64 },

    #[error("profile Jacobian at the left state has no positive eigenvalue")]
    NoUnstableDirection,

    #[error("profile endpoint miss: {what} error {error:e} exceeds tolerance {tolerance:e}")]
    EndpointMiss {
        what: &'static str,
        error: f64,
        tolerance: f64,
    },

    #[error("adaptive integrator failed: {0}")]
    Integrator(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-positive state at node {index}: {what} = {value:e}")]
    NonPositiveState {
        index: usize,
        what: &'static str,
        value: f64,
    },

    #[error("time step {dtau:e} violates the stability limit {limit:e}")]
    CflViolation { dtau: f64, limit: f64 },

    #[error("shock footprint at y = {front:.3} reached within {margin:.3} of the right boundary {y_right:.3}")]
    DomainOutrun {
        front: f64,
        margin: f64,
        y_right: f64,
    },

    #[error("no grid node lies at distance >= {h} from the shock")]
    EmptyRegion { h: f64 },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("validation error at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
