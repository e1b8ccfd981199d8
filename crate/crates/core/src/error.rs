use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fundamental solution is singular at r = 0")]
    Singularity,

    #[error("iterative solver stalled after {iterations} iterations (relative residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("operator cache: {0}")]
    Cache(String),

    #[error("{phase} phase failed: {source}")]
    Phase {
        phase: Phase,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Stage of an experiment, attached to failures surfaced by the harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Config,
    Synthesis,
    Noise,
    Assembly,
    Solve,
    Metrics,
    Export,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::Config => "config",
            Phase::Synthesis => "synthesis",
            Phase::Noise => "noise",
            Phase::Assembly => "assembly",
            Phase::Solve => "solve",
            Phase::Metrics => "metrics",
            Phase::Export => "export",
        };
        f.write_str(s)
    }
}

impl Error {
    pub fn in_phase(self, phase: Phase) -> Self {
        match self {
            e @ Error::Phase { .. } => e,
            e => Error::Phase { phase, source: Box::new(e) },
        }
    }
}
