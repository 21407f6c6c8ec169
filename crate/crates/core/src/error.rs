use thiserror::Error;

/// Errors raised by the numerical and symbolic layers.
///
/// Variants are grouped so the command line front end can map them onto exit
/// codes: `Guard` and `Divergence` are numeric guards, everything else is a
/// structural or parameter problem with the inputs.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("structural error: {0}")]
    Structure(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("rewriting diverged after {0} rule applications")]
    Divergence(usize),
    #[error("numeric guard tripped: {0}")]
    Guard(String),
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("format error: {0}")]
    Format(String),
}

impl CoreError {
    /// True for failures that stem from a numeric guard (NaN, aliasing,
    /// amplification, rewriting divergence).
    pub fn is_numeric_guard(&self) -> bool {
        matches!(self, CoreError::Guard(_) | CoreError::Divergence(_))
    }
}

impl From<std::io::Error> for CoreError {
    fn from(e: std::io::Error) -> Self {
        CoreError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
