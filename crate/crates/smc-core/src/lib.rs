//! Sequential Monte Carlo with a tunable resampling step.
//!
//! The crate provides the model contract ([`StateSpaceModel`]), weighted
//! particle sets and their estimators, the sampling/weighting step
//! ([`sis_step`]) and a family of resampling schemes that trade proposal
//! draws for lower resampling variance: multinomial, independent,
//! semi-independent SR(k), non-sequential NSSR(k) and an MCMC
//! resample-move baseline.

pub mod cost;
pub mod error;
pub mod filter;
pub mod model;
pub mod particles;
pub mod resampling;
pub mod rng;
pub mod sis;

pub use cost::CostLedger;
pub use error::{Result, SmcError};
pub use filter::{ParticleFilter, ResamplePolicy, StepReport};
pub use model::StateSpaceModel;
pub use particles::WeightedParticleSet;
pub use resampling::{
    Diagnostics, Execution, ResampleOutcome, ResamplingScheme, SupportState, TraceEntry,
};
pub use rng::{substream, Stream};
pub use sis::sis_step;
