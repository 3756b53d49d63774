use thiserror::Error;

/// Errors raised by the geometry and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("surface is not spacelike at node ({theta_index}, {phi_index})")]
    NotSpacelike { theta_index: usize, phi_index: usize },

    #[error("gauge error at node ({theta_index}, {phi_index}): {reason}")]
    Gauge {
        theta_index: usize,
        phi_index: usize,
        reason: String,
    },

    #[error("non-finite value at node {node}")]
    NonFinite { node: usize },

    #[error("flow terminated: {0}")]
    FlowTerminated(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
