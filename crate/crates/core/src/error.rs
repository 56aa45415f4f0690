//! Error categories shared by every module.
//!
//! The categories map one-to-one onto the CLI exit codes: validation (3),
//! feasibility (4), numeric failure (5). `InsufficientData` and `FitUndefined`
//! are validation-class errors with more specific names because callers match
//! on them.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum LabError {
    /// Invalid input: broken invariant, bad parameter, mismatched identifiers.
    #[error("validation error: {0}")]
    Validation(String),

    /// The request is well-formed but too large for exact computation.
    #[error("feasibility error: {0}")]
    Feasibility(String),

    /// Not enough observations to produce a stable estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A fit was requested on data that cannot support one.
    #[error("fit undefined: {0}")]
    FitUndefined(String),

    /// Runtime numeric failure (non-finite intermediate, failed convergence).
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    /// Stable machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            LabError::Validation(_) => "validation",
            LabError::Feasibility(_) => "feasibility",
            LabError::InsufficientData(_) => "insufficient_data",
            LabError::FitUndefined(_) => "fit_undefined",
            LabError::Numeric(_) => "numeric",
        }
    }
}
