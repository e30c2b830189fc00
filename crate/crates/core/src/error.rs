use thiserror::Error;

use crate::scoring::Regularizer;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("weight {index} = {value} lies outside the {regularizer} domain")]
    Domain {
        index: usize,
        value: f64,
        regularizer: Regularizer,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("instance refused by tractability guard: {0}")]
    Intractable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
