use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("eigensolver did not converge within {cap} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { cap: usize, off_norm: f64 },

    #[error("matrix dimension {dim} exceeds the oracle cap of {cap}; the oracle is small-N only")]
    OracleCap { dim: usize, cap: usize },

    #[error("no closed-form spectrum for odd N_x = {0}; use numerical_spectrum (N_x <= 12)")]
    OddGrid(usize),

    #[error("degenerate ansatz: xi = {0} gives coincident roots r1 = r2")]
    DegenerateAnsatz(f64),

    #[error(
        "non-positive error {err:e} at dx = {dx:e}; clamp it at a machine-epsilon floor \
         or drop the sample before fitting"
    )]
    NonPositiveSample { dx: f64, err: f64 },

    #[error("state is not H-normalized (norm^2 = {0:.12}); normalize before evaluating moments")]
    NotNormalized(f64),

    #[error("grid N_x = {nx}: {reason}")]
    GridLevels { nx: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}
