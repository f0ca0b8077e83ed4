use thiserror::Error;

/// Errors raised by the numerical and geometric routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The adaptive integrator exhausted its subdivision budget.
    #[error("quadrature did not converge on [{a}, {b}]: estimated error {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        a: f64,
        b: f64,
        error: f64,
        subdivisions: usize,
    },
    /// The integrand returned NaN or an infinity at an interior node.
    #[error("integrand is not finite at t = {t} (value {value})")]
    NonFiniteIntegrand { t: f64, value: f64 },
    /// An argument fell outside the domain of the operation.
    #[error("{what} = {value} is outside the domain [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Slab set is not y-Schwarz symmetric (sections are not nested).
    #[error("set is not y-Schwarz symmetric: {0}")]
    NotSchwarzSymmetric(String),
    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),
    /// The discrete minimizer stopped before reaching its step tolerance.
    #[error("solver did not converge after {iterations} iterations (last step {last_step:e})")]
    SolverNonConvergence { iterations: usize, last_step: f64 },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
