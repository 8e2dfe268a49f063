use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("unbounded: {0}")]
    Unbounded(String),
    #[error("mesh failure: {0}")]
    MeshFailure(String),
    #[error("incompatible boundary conditions: {0}")]
    IncompatibleBc(String),
    #[error("cost gate: {0}")]
    CostGate(String),
}

impl SpectraError {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            SpectraError::InvalidInput(_) => "invalid_input",
            SpectraError::UnsupportedShape(_) => "unsupported_shape",
            SpectraError::ResourceLimit(_) => "resource_limit",
            SpectraError::NumericalFailure(_) => "numerical_failure",
            SpectraError::NotApplicable(_) => "not_applicable",
            SpectraError::Unbounded(_) => "unbounded",
            SpectraError::MeshFailure(_) => "mesh_failure",
            SpectraError::IncompatibleBc(_) => "incompatible_bc",
            SpectraError::CostGate(_) => "cost_gate",
        }
    }

    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            SpectraError::InvalidInput(_)
                | SpectraError::UnsupportedShape(_)
                | SpectraError::NotApplicable(_)
                | SpectraError::IncompatibleBc(_)
                | SpectraError::CostGate(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, SpectraError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(SpectraError::InvalidInput(msg.into()))
}
