use thiserror::Error;

use crate::geometry::GeometryDiagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    #[error("unknown {what} kind `{kind}`")]
    UnknownKind { what: &'static str, kind: String },

    #[error("invalid geometry: {0}")]
    Geometry(#[from] GeometryDiagnostic),

    #[error("energy inner product is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("dissipation matrix is not dissipative: <z, Hz>_X = {value:e} on sample {sample}")]
    NotDissipative { sample: usize, value: f64 },

    #[error("channel matrix `{0}` is rank deficient")]
    RankDeficient(&'static str),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("iteration did not converge after {0} steps")]
    NoConvergence(usize),

    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
