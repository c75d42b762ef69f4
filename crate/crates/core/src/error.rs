//! Error type shared by every module.
//!
//! Two classes matter operationally: `Config` failures (bad inputs,
//! violated preconditions — CLI exit code 1) and `Numerical` failures
//! (insufficient grid coverage, boundary leakage, non-convergence —
//! CLI exit code 2). Each error knows the module and check that raised
//! it so the CLI can emit a single machine-parsable diagnostic line.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid input or violated precondition.
    #[error("{module}.{check}: {message}")]
    Config {
        module: &'static str,
        check: &'static str,
        message: String,
    },
    /// A computation that cannot be completed at the requested accuracy.
    #[error("{module}.{check}: {message}")]
    Numerical {
        module: &'static str,
        check: &'static str,
        message: String,
    },
}

impl Error {
    pub fn config(module: &'static str, check: &'static str, message: impl Into<String>) -> Self {
        Error::Config {
            module,
            check,
            message: message.into(),
        }
    }

    pub fn numerical(
        module: &'static str,
        check: &'static str,
        message: impl Into<String>,
    ) -> Self {
        Error::Numerical {
            module,
            check,
            message: message.into(),
        }
    }

    /// CLI exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 1,
            Error::Numerical { .. } => 2,
        }
    }

    /// One-line diagnostic of the form `ERROR <code>: <module>.<check>`.
    pub fn diagnostic(&self) -> String {
        let (module, check) = match self {
            Error::Config { module, check, .. } | Error::Numerical { module, check, .. } => {
                (module, check)
            }
        };
        format!("ERROR {}: {}.{}", self.exit_code(), module, check)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
