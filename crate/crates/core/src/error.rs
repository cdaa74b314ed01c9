use thiserror::Error;

/// Errors raised anywhere in the evaluation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QbxError {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("capability exceeded: {0}")]
    Capability(String),
    #[error("center placement failed: {0}")]
    Placement(String),
    #[error("geometry violation: {0}")]
    Geometry(String),
    #[error("non-finite integrand at panel {panel}, node {node}")]
    NonFinite { panel: usize, node: usize },
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("config error (line {line}): {message}")]
    Config { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, QbxError>;

impl QbxError {
    /// Short lowercase tag for the variant, used in CSV status fields.
    pub fn kind(&self) -> &'static str {
        match self {
            QbxError::Domain(_) => "domain",
            QbxError::Capability(_) => "capability",
            QbxError::Placement(_) => "placement",
            QbxError::Geometry(_) => "geometry",
            QbxError::NonFinite { .. } => "non_finite",
            QbxError::Convergence(_) => "convergence",
            QbxError::InsufficientData(_) => "insufficient_data",
            QbxError::Numeric(_) => "numeric",
            QbxError::Config { .. } => "config",
            QbxError::Io(_) => "io",
        }
    }

    /// Process exit code: 1 for invalid input, 2 for numerical breakdown.
    pub fn exit_code(&self) -> i32 {
        match self {
            QbxError::NonFinite { .. } | QbxError::Convergence(_) | QbxError::Numeric(_) => 2,
            _ => 1,
        }
    }
}
