use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("u = {u} lies outside the effective domain (b = {bound})")]
    OutsideDomain { u: f64, bound: f64 },

    #[error("function has {found} values but the space has {expected} atoms")]
    SpaceMismatch { expected: usize, found: usize },

    #[error("invalid measure space at atom {atom}: {reason}")]
    InvalidSpace { atom: usize, reason: String },

    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),

    #[error("operation is undefined for the zero function")]
    ZeroFunction,

    #[error("bracket search failed: {0}")]
    Bracket(String),

    #[error("brute-force oracle supports at most {max} support atoms, got {atoms}")]
    OracleScale { atoms: usize, max: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),
}

impl Error {
    /// Numerical failures (bracketing, doubling budgets) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Bracket(_))
    }
}
