use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("Newton iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// The direction β = π, where the wavefront formulas degenerate and the
    /// corner expansion takes over.
    #[error("singular direction: beta = {beta} lies within {tolerance:e} of pi")]
    SingularDirection { beta: f64, tolerance: f64 },

    #[error("negative discriminant {0:e}: tau lies beyond the parabola vertex")]
    NegativeDiscriminant(f64),

    #[error("grid too coarse: continuity residual {residual:e} exceeds {tolerance:e}")]
    GridTooCoarse { residual: f64, tolerance: f64 },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
