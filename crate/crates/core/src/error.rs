use thiserror::Error;

/// Errors raised by field constructors, evaluators and numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point outside the domain of `{field}`: {reason}")]
    Domain { field: String, reason: String },

    #[error("polar radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("material constant k must be positive, got {0}")]
    InvalidK(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("unknown solution `{0}`")]
    UnknownSolution(String),

    #[error("yield violation: |(sx-sy)^2 + 4 t^2 - 4k^2| = {residual:e} exceeds {tol:e} k^2")]
    YieldViolation { residual: f64, tol: f64 },

    #[error("no root in bracket [{lo}, {hi}]")]
    NoRootInBracket { lo: f64, hi: f64 },

    #[error("{count} roots in bracket [{lo}, {hi}]; narrow the bracket")]
    MultipleRoots { count: usize, lo: f64, hi: f64 },

    #[error("characteristic coordinates must be non-zero (xi = {xi}, eta = {eta})")]
    SingularCoords { xi: f64, eta: f64 },

    #[error("quadrature singularity near {at}")]
    QuadratureSingularity { at: f64 },

    #[error("quadrature did not converge on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },

    #[error("start point is outside the field domain")]
    StartOutsideDomain,

    #[error("`{field}` does not provide {what}")]
    UnsupportedField { field: String, what: String },

    #[error("no envelope: {0}")]
    NoEnvelope(String),

    #[error("Jacobian has no sign change in the scanned region")]
    NoSignChange,

    #[error("stagnation point: |(u, v)| = {0:e}")]
    StagnationPoint(f64),

    #[error("dissipation sign is indeterminate at an isotropic stress state")]
    IndeterminateAtStressIsotropy,

    #[error("hodograph Jacobian vanishes ({0:e})")]
    SingularJacobian(f64),

    #[error("background mismatch: {0}")]
    BackgroundMismatch(String),

    #[error("supplied pair does not solve the linear system: residual {0:e}")]
    NotASolution(f64),
}

impl Error {
    pub(crate) fn domain(field: &str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors that mean "this point is not where the solution lives"
    /// rather than "the request itself is malformed".
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::NonPositiveRadius(_)
                | Error::NoRootInBracket { .. }
                | Error::MultipleRoots { .. }
                | Error::SingularCoords { .. }
                | Error::QuadratureSingularity { .. }
                | Error::StartOutsideDomain
                | Error::StagnationPoint(_)
                | Error::SingularJacobian(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
