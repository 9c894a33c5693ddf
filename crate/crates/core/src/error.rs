use thiserror::Error;

use crate::point::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where a formula or construction applies.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method did not reach the requested accuracy.
    #[error("numeric error: {message} (achieved {achieved:.3e})")]
    Numeric { message: String, achieved: f64 },

    /// The cluster topology is broken (open loop, bad orientation, ...).
    #[error("structural error: {message}{}", vertex.map(|v| format!(" at ({:.6}, {:.6})", v.x, v.y)).unwrap_or_default())]
    Structural {
        message: String,
        vertex: Option<Point>,
    },

    /// Two disks overlap by more than the contact tolerance.
    #[error("infeasible configuration: disks {i} and {j} overlap by {overlap:.3e}")]
    Infeasible { i: usize, j: usize, overlap: f64 },

    /// A builder could not realize the requested geometry.
    #[error("construction error: {0}")]
    Construction(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn structural(msg: impl Into<String>, vertex: Option<Point>) -> Self {
        Error::Structural {
            message: msg.into(),
            vertex,
        }
    }

    /// Short machine-readable tag used in error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Numeric { .. } => "numeric",
            Error::Structural { .. } => "structural",
            Error::Infeasible { .. } => "infeasible",
            Error::Construction(_) => "construction",
            Error::Resource(_) => "resource",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Config(_) => "config",
        }
    }
}
