//! The semi-independent resampling family.
//!
//! Every scheme draws output particle `i` from a support x̃^{i,:}. The
//! schemes differ only in how support `i` is obtained:
//!
//! | scheme                | support `i`                                        |
//! |-----------------------|----------------------------------------------------|
//! | `Multinomial`         | the SIS support, unchanged                         |
//! | `Independent`         | all N slots redrawn                                |
//! | `SemiIndependent(k)`  | support `i-1` with `k` random slots redrawn        |
//! | `NonSequential(k)`    | the SIS support with `k` random slots redrawn      |
//! | `ResampleMove(k)`     | multinomial, then `k` independent MH moves         |
//!
//! Every scheme has the same conditional mean given the ancestors; the
//! conditional variance shrinks as supports become more diverse.

mod draw;
mod independent;
mod multinomial;
mod nonsequential;
mod resample_move;
mod semi_independent;
mod support;

use std::collections::HashSet;
use std::fmt;

use rand::Rng;

use crate::cost::CostLedger;
use crate::error::{Result, SmcError};
use crate::model::StateSpaceModel;
use crate::particles::WeightedParticleSet;

pub use draw::{categorical, subset};
pub use independent::independent_resample;
pub use multinomial::multinomial_resample;
pub use nonsequential::nonsequential_resample;
pub use resample_move::{mh_log_acceptance, resample_move};
pub use semi_independent::semi_independent_resample;
pub use support::SupportState;

/// How NSSR supports are scheduled. Results do not depend on the choice.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResamplingScheme {
    Multinomial,
    Independent,
    SemiIndependent(usize),
    NonSequential(usize),
    ResampleMove(usize),
}

impl ResamplingScheme {
    /// Rejuvenation count k, if the scheme has one.
    pub fn k(&self) -> Option<usize> {
        match *self {
            Self::Multinomial | Self::Independent => None,
            Self::SemiIndependent(k) | Self::NonSequential(k) | Self::ResampleMove(k) => Some(k),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            Self::SemiIndependent(k) | Self::NonSequential(k) if k > n => {
                Err(SmcError::InvalidRejuvenationCount { k, n })
            }
            _ => Ok(()),
        }
    }

    /// Proposal draws per filter step, SIS included.
    pub fn proposal_draws_per_step(&self, n: usize) -> u64 {
        let n = n as u64;
        match *self {
            Self::Multinomial => n,
            Self::Independent => n * n,
            Self::SemiIndependent(k) | Self::NonSequential(k) => n + (n - 1) * k as u64,
            Self::ResampleMove(k) => n + n * k as u64,
        }
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            Self::Multinomial => "sir",
            Self::Independent => "isir",
            Self::SemiIndependent(_) => "sr",
            Self::NonSequential(_) => "nssr",
            Self::ResampleMove(_) => "rm",
        }
    }

    /// Resamples the support produced by the SIS step from `prev`.
    /// The returned cost includes the SIS draws recorded in `support`.
    pub fn resample<M, R>(
        &self,
        prev: &WeightedParticleSet<M::State>,
        support: &SupportState<M::State>,
        model: &M,
        obs: &M::Observation,
        rng: &mut R,
        execution: Execution,
    ) -> Result<ResampleOutcome<M::State>>
    where
        M: StateSpaceModel,
        R: Rng + ?Sized,
    {
        self.validate(support.len())?;
        match *self {
            Self::Multinomial => {
                let mut out = multinomial::from_support(support, rng);
                out.cost += support.cost();
                Ok(out)
            }
            Self::Independent => independent_resample(prev, support, model, obs, rng),
            Self::SemiIndependent(k) => semi_independent_resample(prev, support, k, model, obs, rng),
            Self::NonSequential(k) => {
                nonsequential_resample(prev, support, k, model, obs, rng, execution)
            }
            Self::ResampleMove(k) => resample_move(prev, support, k, model, obs, rng),
        }
    }
}

impl fmt::Display for ResamplingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k() {
            Some(k) => write!(f, "{}({k})", self.short_name()),
            None => f.write_str(self.short_name()),
        }
    }
}

/// Where output particle `i` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceEntry {
    /// Support index `i` the particle was drawn from.
    pub generation: usize,
    /// Chosen slot l^i, which is also the ancestor index in the previous set.
    pub slot: usize,
    /// Identifier of the proposal draw that produced the particle; equal ids
    /// mean equal particles.
    pub draw_id: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Diagnostics {
    pub distinct_ancestors: usize,
    pub distinct_particles: usize,
}

#[derive(Debug, Clone)]
pub struct ResampleOutcome<X> {
    /// Output particles, each weighted exactly 1/N.
    pub resampled: WeightedParticleSet<X>,
    pub index_trace: Vec<TraceEntry>,
    pub cost: CostLedger,
    pub diagnostics: Diagnostics,
}

impl<X> ResampleOutcome<X> {
    pub(crate) fn assemble(particles: Vec<X>, index_trace: Vec<TraceEntry>, cost: CostLedger) -> Self {
        let distinct_ancestors = index_trace.iter().map(|e| e.slot).collect::<HashSet<_>>().len();
        let distinct_particles = index_trace
            .iter()
            .map(|e| e.draw_id)
            .collect::<HashSet<_>>()
            .len();
        Self {
            resampled: WeightedParticleSet::uniform(particles)
                .expect("resampling never yields an empty set"),
            index_trace,
            cost,
            diagnostics: Diagnostics {
                distinct_ancestors,
                distinct_particles,
            },
        }
    }
}
