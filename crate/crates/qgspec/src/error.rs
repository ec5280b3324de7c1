use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex degree must be at least 3, got {0}")]
    InvalidDegree(usize),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("scan reaches k = {have} but sqrt(K) = {needed} is required")]
    InsufficientScan { needed: f64, have: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("denominator vanishes near k = {0}; evaluate the raw bracket instead")]
    SingularDenominator(f64),
    #[error("{found} negative bands found, at most {bound} allowed")]
    BandCountExceeded { found: usize, bound: usize },
    #[error("root bracketing failed: {0}")]
    Bracketing(String),
}

impl Error {
    /// True for errors that signal a broken internal invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::BandCountExceeded { .. } | Error::Bracketing(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
