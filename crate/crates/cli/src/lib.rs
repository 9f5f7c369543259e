//! Experiment runner for `aqin-core`: config files, a scenario registry,
//! and CSV/JSON trace output.
//!
//! Exit codes: 0 success, 1 a declared mapping property was falsified,
//! 2 configuration or hypothesis failure, 3 inner-solver failure.

pub mod commands;
pub mod config;
pub mod output;
pub mod scenarios;

use std::fmt;

use aqin_core::Error;

pub use config::{ExperimentConfig, Overrides};

/// A command failure with its process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn falsified(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn inner(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    /// Unexpected failures (I/O on stdout, trace integrity).
    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }

    pub fn from_core(e: Error) -> Self {
        match e {
            Error::InnerStalled { .. } | Error::ContractionPrecondition { .. } => Self::inner(e.to_string()),
            Error::TraceIntegrity { .. } => Self::internal(e.to_string()),
            _ => Self::config(e.to_string()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}
