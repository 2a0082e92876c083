//! Dispatch by algorithm name.

use thiserror::Error;

use crate::amdp::{self, AmdpError};
use crate::amr2::{self, Amr2Error};
use crate::baseline;
use crate::model::{Algorithm, Instance, SolveReport};
use crate::oracle::{self, ExactOptions, OracleError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("{0}")]
    Precondition(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<Amr2Error> for SolveError {
    fn from(e: Amr2Error) -> Self {
        match e {
            Amr2Error::InfeasibleInstance(msg) => SolveError::Infeasible(msg),
            Amr2Error::Internal(msg) => SolveError::Internal(msg),
        }
    }
}

impl From<AmdpError> for SolveError {
    fn from(e: AmdpError) -> Self {
        match e {
            AmdpError::Infeasible { .. } => SolveError::Infeasible(e.to_string()),
            other => SolveError::Precondition(other.to_string()),
        }
    }
}

impl From<OracleError> for SolveError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Infeasible => SolveError::Infeasible(e.to_string()),
            OracleError::TooLarge { .. } => SolveError::Precondition(e.to_string()),
        }
    }
}

/// Runs `algorithm` on `instance`. `delta` is the AMDP grid resolution.
pub fn solve(instance: &Instance, algorithm: Algorithm, delta: f64) -> Result<SolveReport, SolveError> {
    Ok(match algorithm {
        Algorithm::Amr2 => amr2::run_amr2(instance)?,
        Algorithm::Amdp => amdp::run_amdp(instance, delta)?,
        Algorithm::AmdpHetero => amdp::run_amdp_hetero(instance, delta)?,
        Algorithm::Greedy => baseline::greedy_rra(instance),
        Algorithm::Exact => oracle::exact_ilp(instance, ExactOptions::default())?,
    })
}
