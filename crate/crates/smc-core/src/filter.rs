//! Sequential filter driver: SIS step, optional resampling, repeat.

use rand::Rng;

use crate::cost::CostLedger;
use crate::error::{Result, SmcError};
use crate::model::StateSpaceModel;
use crate::particles::WeightedParticleSet;
use crate::resampling::{Execution, ResampleOutcome, ResamplingScheme, SupportState};

/// When the resampling step runs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum ResamplePolicy {
    /// Resample at every step.
    #[default]
    Always,
    /// Resample when the ESS of the SIS output falls below `fraction · N`.
    EssBelow(f64),
    Never,
}

impl ResamplePolicy {
    pub fn should_resample<X>(&self, set: &WeightedParticleSet<X>) -> bool {
        match *self {
            Self::Always => true,
            Self::EssBelow(fraction) => set.effective_sample_size() < fraction * set.len() as f64,
            Self::Never => false,
        }
    }
}

/// Result of one filter step.
#[derive(Debug, Clone)]
pub struct StepReport<X> {
    /// SIS output {w̃^i, x̃^i}, before resampling.
    pub weighted: WeightedParticleSet<X>,
    /// Present when the policy triggered resampling.
    pub outcome: Option<ResampleOutcome<X>>,
    /// Everything spent in this step, SIS included.
    pub cost: CostLedger,
}

impl<X> StepReport<X> {
    /// The set carried to the next step.
    pub fn current(&self) -> &WeightedParticleSet<X> {
        self.outcome
            .as_ref()
            .map_or(&self.weighted, |o| &o.resampled)
    }
}

pub struct ParticleFilter<'m, M: StateSpaceModel> {
    model: &'m M,
    scheme: ResamplingScheme,
    policy: ResamplePolicy,
    execution: Execution,
    current: WeightedParticleSet<M::State>,
}

impl<'m, M: StateSpaceModel> ParticleFilter<'m, M> {
    /// Draws `n` particles from the prior and weights them by the first
    /// observation. No resampling happens at time zero.
    pub fn initialize<R: Rng + ?Sized>(
        model: &'m M,
        n: usize,
        scheme: ResamplingScheme,
        policy: ResamplePolicy,
        first_obs: &M::Observation,
        rng: &mut R,
    ) -> Result<Self> {
        if n == 0 {
            return Err(SmcError::Empty);
        }
        scheme.validate(n)?;
        let particles: Vec<M::State> = (0..n).map(|_| model.sample_initial(rng)).collect();
        let log_weights = particles
            .iter()
            .map(|x| model.log_likelihood(x, first_obs))
            .collect();
        let current = WeightedParticleSet::from_log_weights(particles, log_weights)?;
        Ok(Self {
            model,
            scheme,
            policy,
            execution: Execution::default(),
            current,
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn current(&self) -> &WeightedParticleSet<M::State> {
        &self.current
    }

    pub fn scheme(&self) -> ResamplingScheme {
        self.scheme
    }

    pub fn step<R: Rng + ?Sized>(
        &mut self,
        obs: &M::Observation,
        rng: &mut R,
    ) -> Result<StepReport<M::State>> {
        let support = SupportState::from_sis(&self.current, self.model, obs, rng)?;
        let weighted = support.sis_set();
        let outcome = if self.policy.should_resample(&weighted) {
            Some(self.scheme.resample(
                &self.current,
                &support,
                self.model,
                obs,
                rng,
                self.execution,
            )?)
        } else {
            None
        };
        let cost = outcome.as_ref().map_or(support.cost(), |o| o.cost);
        let report = StepReport {
            weighted,
            outcome,
            cost,
        };
        self.current = report.current().clone();
        Ok(report)
    }
}
