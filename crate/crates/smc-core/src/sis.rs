//! Sampling and weighting (the S. and W. lines of one SIR iteration).

use rand::Rng;

use crate::cost::CostLedger;
use crate::error::Result;
use crate::model::StateSpaceModel;
use crate::particles::WeightedParticleSet;

pub(crate) struct Propagated<X> {
    pub particles: Vec<X>,
    pub log_increments: Vec<f64>,
    pub raw_log_weights: Vec<f64>,
}

pub(crate) fn propagate<M, R>(
    prev: &WeightedParticleSet<M::State>,
    model: &M,
    obs: &M::Observation,
    rng: &mut R,
    ledger: &mut CostLedger,
) -> Propagated<M::State>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    let n = prev.len();
    let mut particles = Vec::with_capacity(n);
    let mut log_increments = Vec::with_capacity(n);
    let mut raw_log_weights = Vec::with_capacity(n);
    for (j, parent) in prev.particles().iter().enumerate() {
        let x = model.sample_proposal(parent, obs, rng);
        let incr = model.log_incremental_weight(parent, &x, obs);
        raw_log_weights.push(prev.normalized_log_weight(j) + incr);
        log_increments.push(incr);
        particles.push(x);
    }
    ledger.proposal_draws += n as u64;
    ledger.density_evals += n as u64;
    Propagated {
        particles,
        log_increments,
        raw_log_weights,
    }
}

/// Draws x̃^i ~ q(·|x^i_{t-1}) for every slot and weights it by
/// w^i_{t-1} f g / q. Returns a degeneracy error when every new weight is
/// zero; the caller decides on a fallback.
pub fn sis_step<M, R>(
    prev: &WeightedParticleSet<M::State>,
    model: &M,
    obs: &M::Observation,
    rng: &mut R,
    ledger: &mut CostLedger,
) -> Result<WeightedParticleSet<M::State>>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    let p = propagate(prev, model, obs, rng, ledger);
    WeightedParticleSet::from_log_weights(p.particles, p.raw_log_weights)
}
