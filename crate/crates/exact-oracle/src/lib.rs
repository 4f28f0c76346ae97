//! Exact verification oracle for the resampling family.
//!
//! On a finite state space with at most three particles, every random
//! choice a resampling scheme makes (support draws, index draws, subsets,
//! redraws, MH moves) can be enumerated. This yields the exact law of the
//! resampled tuple, hence exact conditional means and variances of the
//! post-resampling estimator, and a reference for goodness-of-fit tests of
//! the Monte Carlo implementations.

mod enumerate;
mod hmm;
mod report;
mod sum;
mod validate;

use thiserror::Error;

pub use enumerate::{
    enumerate_law, enumerate_scheme, ExactLaw, ExactMoments, MAX_MOVES, MAX_PARTICLES, MAX_STATES,
};
pub use hmm::DiscreteHmm;
pub use report::{check_propositions, PropositionReport, SchemeMoments, Verdict, EXACT_TOLERANCE};
pub use sum::CompensatedSum;
pub use validate::{validate_sampler, validate_sampler_against, FitReport, OutcomeDeviation};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("enumeration refused: {what} = {value} exceeds the bound {bound}")]
    TooLarge {
        what: &'static str,
        value: usize,
        bound: usize,
    },
    #[error("invalid discrete model: {0}")]
    InvalidModel(String),
    #[error("a support with positive probability has all-zero weights at generation {generation}")]
    Degenerate { generation: usize },
    #[error("sampler produced outcome {outcome:?}, which has zero exact probability")]
    ImpossibleOutcome { outcome: Vec<usize> },
    #[error(transparent)]
    Sampler(#[from] smc_core::SmcError),
}
