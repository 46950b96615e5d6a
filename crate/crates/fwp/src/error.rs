use thiserror::Error;

/// Coarse classification used by front ends to pick exit codes:
/// input/schema problems versus numerical failures at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input: bad shapes, violated invariants, unknown names.
    Input,
    /// The input was well-formed but the computation failed numerically.
    Numerical,
}

#[derive(Debug, Error)]
pub enum FwpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Scenario file violates the schema; `path` is the offending field.
    #[error("scenario error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("unknown contact point `{0}`")]
    UnknownContact(String),

    #[error(
        "contact `{name}` is not established: contact-point speed {speed:.3e} exceeds {limit:.3e}"
    )]
    ContactNotEstablished { name: String, speed: f64, limit: f64 },

    #[error("singular mass matrix: {0}")]
    SingularMass(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl FwpError {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        FwpError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            FwpError::Dimension(_)
            | FwpError::InvalidInput(_)
            | FwpError::Schema { .. }
            | FwpError::UnknownContact(_) => ErrorClass::Input,
            FwpError::ContactNotEstablished { .. }
            | FwpError::SingularMass(_)
            | FwpError::Numerical(_) => ErrorClass::Numerical,
        }
    }
}
