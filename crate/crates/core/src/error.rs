use thiserror::Error;

/// Errors produced by the estimators, tests and simulation harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("insufficient sample: need at least {needed} observations, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    /// The response has too little variation for the estimator to be defined
    /// (n0 = n for the general estimator, all values equal for the rank forms).
    #[error("degenerate response: {0}")]
    DegenerateResponse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Input(format!(
            "{what} contains a non-finite value at position {i}"
        ))),
        None => Ok(()),
    }
}

pub(crate) fn ensure_len(got: usize, needed: usize) -> Result<()> {
    if got < needed {
        Err(Error::InsufficientSample { needed, got })
    } else {
        Ok(())
    }
}
