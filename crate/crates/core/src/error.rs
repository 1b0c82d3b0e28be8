use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite matrix coefficient `{name}`")]
    NonFinite { name: &'static str },

    #[error("matrix is not positive definite: leading minor {index} is {value:e} (must be > 0)")]
    NotPositiveDefinite { index: usize, value: f64 },

    #[error("flow is degenerate (mu = {mu:e} within threshold {eps:e})")]
    DegenerateFlow { mu: f64, eps: f64 },

    #[error("flow is not elliptic (mu = {mu:e})")]
    NotElliptic { mu: f64 },

    #[error("quadrature did not reach tolerance after {subdivisions} subdivisions (error estimate {estimate:e})")]
    QuadratureFailure { subdivisions: usize, estimate: f64 },

    #[error("field representation mismatch: expected {expected}, found {found}")]
    RepMismatch { expected: &'static str, found: &'static str },

    #[error(
        "time {t} exceeds the resolvable range: evolved frequency {max_frequency:.6} exceeds the Nyquist frequency {nyquist:.6} (or |t| > clamp {clamp})"
    )]
    TimeClamp { t: f64, max_frequency: f64, nyquist: f64, clamp: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
