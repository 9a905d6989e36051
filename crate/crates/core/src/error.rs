use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = LevyError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LevyError {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("invalid stable index {l}/{k}: need 0 < l < k with gcd(l, k) = 1")]
    InvalidIndex { l: i64, k: i64 },

    #[error("no closed form for index {0}; supported: 1/2, 1/3, 2/3, 1/4, 1/6")]
    UnsupportedIndex(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("integrand returned {value} at t = {at:e}")]
    NonFinite { at: f64, value: f64 },

    #[error("quadrature did not converge: value {value:e}, estimated error {est_error:e}")]
    Quadrature { value: f64, est_error: f64 },

    #[error("tabulation failed at x = {x:e}: {detail}")]
    Tabulation { x: f64, detail: String },

    #[error("tabulation accuracy {achieved:e} exceeds bound {bound:e}; try more nodes than {nodes}")]
    TabulationAccuracy { achieved: f64, bound: f64, nodes: usize },

    #[error("cache file {path}: {detail}")]
    Cache { path: PathBuf, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LevyError {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        LevyError::Domain { op, detail: detail.into() }
    }
}
