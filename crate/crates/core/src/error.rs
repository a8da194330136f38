use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are grouped by how a caller should react: invalid input,
/// a physically meaningful "no solution" outcome, or a numerical failure.
/// [`Error::category`] exposes that grouping.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown unit tag `{0}`")]
    UnknownUnit(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("validation error at row {row}: {message}")]
    Validation { row: usize, message: String },

    #[error("underdetermined fit: {0}")]
    Underdetermined(String),

    #[error("pressure {pressure} is below the stiffness constant {k0}; no nonnegative density exists")]
    OutOfBranch { pressure: f64, k0: f64 },

    #[error("compactness 2M/r reached {compactness} at r = {radius} before the surface")]
    HorizonApproach { radius: f64, compactness: f64 },

    #[error("no finite radius for polytropic index n = {n}")]
    NoFiniteRadius { n: f64 },

    #[error("singular point of the rational relation at M = {mass}")]
    SingularPoint { mass: f64 },

    #[error("fold point (dR/dM = 0) near M = {mass}")]
    FoldPoint { mass: f64 },

    #[error("exponent b = 0 is excluded for monomial relations")]
    ExcludedExponent,

    #[error("constraint set is empty: {0}")]
    Infeasible(String),

    #[error("integration did not converge: {0}")]
    NonConvergence(String),

    #[error("inversion failed: {0}")]
    InversionFailure(String),

    #[error("I/O error: {0}")]
    Io(String),
}

/// Coarse classification used by the command-line exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    NoSolution,
    Numerical,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Domain(_)
            | Error::InvalidParameter(_)
            | Error::UnknownUnit(_)
            | Error::Parse { .. }
            | Error::Validation { .. }
            | Error::Underdetermined(_)
            | Error::ExcludedExponent
            | Error::Io(_) => ErrorCategory::Input,
            Error::OutOfBranch { .. }
            | Error::HorizonApproach { .. }
            | Error::NoFiniteRadius { .. }
            | Error::SingularPoint { .. }
            | Error::FoldPoint { .. }
            | Error::Infeasible(_) => ErrorCategory::NoSolution,
            Error::NonConvergence(_) | Error::InversionFailure(_) => ErrorCategory::Numerical,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive and finite, got {value}")))
    }
}
