//! Library backing the `objectddm` command-line tool. The binary is a thin
//! argument parser; everything it can do is reachable through [`spec`] and
//! [`harness`] with identical results.

pub mod harness;
pub mod spec;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad or inconsistent configuration; exit code 2.
    #[error("config error: {0}")]
    Config(String),
    /// Failed reads or writes of data files; exit code 3.
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Io(_) => 3,
        }
    }
}

impl From<oddm_core::SceneError> for HarnessError {
    fn from(err: oddm_core::SceneError) -> Self {
        use oddm_core::SceneError::*;
        match err {
            Io { .. } => HarnessError::Io(err.to_string()),
            Raster { .. } | NonFiniteValue { .. } | NegativeValue { .. }
            | UnknownLabel { .. } => HarnessError::Io(err.to_string()),
            ManifestParse(_) | ManifestField { .. } | Events { .. } => {
                HarnessError::Config(err.to_string())
            }
        }
    }
}
