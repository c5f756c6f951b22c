use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("stereographic projection is undefined at the pole (1,0,0,0)")]
    Pole,

    #[error("coordinate {index} = {value} lies on an interval endpoint")]
    BoundaryCoordinate { index: usize, value: f64 },

    #[error("coincident coordinates: {0}")]
    Degenerate(String),

    #[error("singular operation: {0}")]
    Singular(String),

    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: String },

    #[error("degenerate surface: {0}")]
    DegenerateSurface(String),

    #[error("initial vector is zero; the solution is trivial")]
    TrivialSolution,

    #[error("integration failed at t = {t}: {reason}")]
    Accuracy { t: f64, reason: String },

    #[error("eigenvalue search failed in bracket [{lo}, {hi}]: {reason}")]
    Search { lo: f64, hi: f64, reason: String },

    #[error(
        "two-parameter solve did not converge: lambda1 bracket [{lo}, {hi}], \
         eigencurve values ({f_lower}, {f_upper})"
    )]
    NonConvergence {
        lo: f64,
        hi: f64,
        f_lower: f64,
        f_upper: f64,
    },

    #[error("internal consistency: {0}")]
    InternalConsistency(String),

    #[error("eigen solves failed for {} index(es): {}", failed.len(), failed.join(", "))]
    PartialResult { failed: Vec<String> },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(value: f64, domain: impl Into<String>) -> Self {
        Error::Domain {
            value,
            domain: domain.into(),
        }
    }

    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::Pole => "pole",
            Error::BoundaryCoordinate { .. } => "boundary_coordinate",
            Error::Degenerate(_) => "degenerate",
            Error::Singular(_) => "singular",
            Error::Domain { .. } => "domain",
            Error::DegenerateSurface(_) => "degenerate_surface",
            Error::TrivialSolution => "trivial_solution",
            Error::Accuracy { .. } => "accuracy",
            Error::Search { .. } => "search",
            Error::NonConvergence { .. } => "non_convergence",
            Error::InternalConsistency(_) => "internal_consistency",
            Error::PartialResult { .. } => "partial_result",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
