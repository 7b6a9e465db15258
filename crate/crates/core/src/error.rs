use thiserror::Error;

/// Errors produced by the library.
///
/// Every variant has a stable machine-readable [`Error::kind`] used by the CLI
/// when it emits one-line error records.
#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("unknown registry name `{0}`")]
    UnknownName(String),

    #[error("parameter out of range for `{name}`: {detail}")]
    ParameterOutOfRange { name: String, detail: String },

    #[error("domain violation: D_m(f) = {dm} exceeds the G-domain supremum {nu}")]
    DomainViolation { dm: f64, nu: f64 },

    #[error("indeterminate limit: {0}")]
    Indeterminate(String),

    #[error("generator not admissible: {0}")]
    NotAdmissible(String),

    #[error("objective is +inf for every candidate output distribution")]
    NonFiniteObjective,

    #[error("second derivative unavailable for `{0}` and finite differences are disabled")]
    MissingDerivative(String),

    #[error("invalid transform `{name}`: G'({x}) = {value} is not positive")]
    InvalidTransform { name: String, x: f64, value: f64 },

    #[error("`{0}` requires a convex G")]
    ConvexityRequired(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::InvalidDistribution(_) => "invalid_distribution",
            Error::InvalidChannel(_) => "invalid_channel",
            Error::UnknownName(_) => "unknown_name",
            Error::ParameterOutOfRange { .. } => "parameter_out_of_range",
            Error::DomainViolation { .. } => "domain_violation",
            Error::Indeterminate(_) => "indeterminate",
            Error::NotAdmissible(_) => "not_admissible",
            Error::NonFiniteObjective => "non_finite_objective",
            Error::MissingDerivative(_) => "missing_derivative",
            Error::InvalidTransform { .. } => "invalid_transform",
            Error::ConvexityRequired(_) => "convexity_required",
            Error::InvalidInput(_) => "invalid_input",
            Error::Json(_) => "malformed_json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::SizeMismatch { expected, got })
    }
}
