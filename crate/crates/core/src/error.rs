//! Error type shared by the library and the command-line front end.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("gram matrix is not symmetric")]
    AsymmetricGram,
    #[error("gram matrix is singular")]
    SingularGram,
    #[error("matrix does not preserve the form")]
    NotOrthogonal,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::Shape(_)
            | Error::AsymmetricGram
            | Error::SingularGram
            | Error::NotOrthogonal
            | Error::Precondition(_) => 2,
            Error::Internal(_) => 3,
            Error::BudgetExhausted(_) => 1,
        }
    }
}
