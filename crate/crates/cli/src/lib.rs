//! Experiment harness behind the `junta` binary: planted instances, seeded
//! trials, calibration and CSV output.

pub mod cmd;
pub mod constants;
pub mod output;
pub mod plant;

pub use constants::Constants;

use junta_core::dist::DistError;
use junta_core::junta_learner::LearnerError;
use junta_core::reductions::ReductionError;
use junta_core::tester::TesterError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// A sample-size or input precondition of the library was violated.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("success rate {rate:.3} below required {required:.3}")]
    BelowThreshold { rate: f64, required: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Contract(_) => 2,
            CliError::BelowThreshold { .. } => 3,
        }
    }
}

impl From<LearnerError> for CliError {
    fn from(e: LearnerError) -> Self {
        match e {
            LearnerError::BadParameter(m) => CliError::Usage(m),
            LearnerError::Tester(TesterError::BadConfig(m)) => CliError::Usage(m),
            other => CliError::Contract(other.to_string()),
        }
    }
}

impl From<TesterError> for CliError {
    fn from(e: TesterError) -> Self {
        match e {
            TesterError::BadConfig(m) => CliError::Usage(m),
            other => CliError::Contract(other.to_string()),
        }
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::BadParameter(m) => CliError::Usage(m),
            ReductionError::Learner(l) => l.into(),
            other => CliError::Contract(other.to_string()),
        }
    }
}

/// Fails with [`CliError::BelowThreshold`] when `rate < required`.
pub fn check_rate(rate: f64, required: f64) -> Result<(), CliError> {
    if rate < required {
        Err(CliError::BelowThreshold { rate, required })
    } else {
        Ok(())
    }
}
