use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the simulator and allocation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a mathematical function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// A channel matrix handed to the precoder had (numerically) deficient rank.
    #[error("singular channel matrix: smallest/largest singular value ratio {ratio:.3e}")]
    Singular { ratio: f64 },

    /// A closed-form interior allocation fell outside (0, 1].
    #[error("closed-form allocation {value} outside (0, 1] for {phase}")]
    InconsistentAllocation { phase: &'static str, value: f64 },

    /// One or more configuration constraints were violated.
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
