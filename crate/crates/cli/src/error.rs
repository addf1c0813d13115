//! Failure classes and their exit codes: 2 parse, 3 physics, 4 I/O,
//! 5 data.

use thiserror::Error;
use vacdisp_core::montecarlo::CsvError;
use vacdisp_core::{InferenceError, PropagationError, SimulationError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Physics(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Physics(_) => 3,
            CliError::Io(_) => 4,
            CliError::Data(_) => 5,
        }
    }
}

impl From<PropagationError> for CliError {
    fn from(e: PropagationError) -> Self {
        CliError::Physics(e.to_string())
    }
}

impl From<SimulationError> for CliError {
    fn from(e: SimulationError) -> Self {
        match e {
            SimulationError::InvalidParameter { .. } => CliError::Parse(e.to_string()),
            other => CliError::Physics(other.to_string()),
        }
    }
}

impl From<InferenceError> for CliError {
    fn from(e: InferenceError) -> Self {
        match e {
            InferenceError::InsufficientEvents { .. } => CliError::Data(e.to_string()),
            InferenceError::InvalidTrimFraction(_)
            | InferenceError::InvalidZ(_)
            | InferenceError::EmptyGrid
            | InferenceError::InvalidGridValue { .. } => CliError::Parse(e.to_string()),
            other => CliError::Physics(other.to_string()),
        }
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        CliError::Data(e.to_string())
    }
}
