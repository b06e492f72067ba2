use thiserror::Error;

/// Errors are split into input validation and numerical failure; the CLI maps
/// the first kind to exit code 2 and the second to 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("array length {got} does not match grid size {expected}")]
    Shape { expected: usize, got: usize },
    #[error("frequency too close to a singular point (0, 0, ±κ⁻¹): {0:?}")]
    Singular([f64; 3]),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
