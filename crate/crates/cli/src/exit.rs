//! Process exit codes.

use std::fmt;

use tah_core::Error;

pub const PARSE: u8 = 2;
pub const EMPTY: u8 = 3;
pub const IO: u8 = 4;
pub const COMPARATOR: u8 = 5;
pub const DUPLICATE_ID: u8 = 6;
pub const CORRUPT_DB: u8 = 7;

/// An error paired with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }

    pub fn msg(code: u8, message: impl fmt::Display) -> Self {
        Self::new(code, anyhow::anyhow!("{message}"))
    }

    pub fn context(self, ctx: impl fmt::Display) -> Self {
        let ctx = ctx.to_string();
        Self {
            code: self.code,
            error: self.error.context(ctx),
        }
    }
}

pub fn code_of(e: &Error) -> u8 {
    match e {
        Error::EmptyGraph | Error::EmptySignature => EMPTY,
        Error::Io(_) => IO,
        Error::Comparator { .. } | Error::BudgetExceeded { .. } | Error::ParamMismatch(_) => {
            COMPARATOR
        }
        _ => PARSE,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::new(code_of(&e), e)
    }
}

pub type CliResult<T> = Result<T, Failure>;
