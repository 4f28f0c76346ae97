use rand::Rng;

use crate::error::Result;
use crate::model::StateSpaceModel;
use crate::particles::WeightedParticleSet;

use super::{draw, ResampleOutcome, SupportState, TraceEntry};

/// log of the independent Metropolis-Hastings acceptance probability
/// min{1, r(proposed) / r(current)} with r = f g / q in the log domain.
pub fn mh_log_acceptance(current_log_ratio: f64, proposed_log_ratio: f64) -> f64 {
    if proposed_log_ratio == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if current_log_ratio == f64::NEG_INFINITY || proposed_log_ratio >= current_log_ratio {
        return 0.0;
    }
    proposed_log_ratio - current_log_ratio
}

/// Multinomial resampling followed by `k` independent-MH moves per particle.
///
/// Each particle keeps its resampled ancestor a fixed and targets
/// f(x|x^a_{t-1}) g(y|x), proposing from q(·|x^a_{t-1}). Costs N·k proposal
/// draws on top of SIS.
pub fn resample_move<M, R>(
    prev: &WeightedParticleSet<M::State>,
    initial: &SupportState<M::State>,
    k: usize,
    model: &M,
    obs: &M::Observation,
    rng: &mut R,
) -> Result<ResampleOutcome<M::State>>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    let n = initial.len();
    let mut cost = initial.cost();
    let ancestors: Vec<usize> = (0..n).map(|_| draw::categorical(initial.weights(), rng)).collect();
    cost.categorical_draws += n as u64;

    let mut out = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(n);
    let mut next_id = n as u64;
    for (i, &a) in ancestors.iter().enumerate() {
        let parent = &prev.particles()[a];
        let mut x = initial.particles()[a].clone();
        let mut log_ratio = initial.log_increments()[a];
        let mut id = initial.draw_id(a);
        for _ in 0..k {
            let proposal = model.sample_proposal(parent, obs, rng);
            let proposal_ratio = model.log_incremental_weight(parent, &proposal, obs);
            let u: f64 = rng.random();
            let log_alpha = mh_log_acceptance(log_ratio, proposal_ratio);
            if log_alpha == 0.0 || u < log_alpha.exp() {
                x = proposal;
                log_ratio = proposal_ratio;
                id = next_id;
            }
            next_id += 1;
        }
        out.push(x);
        trace.push(TraceEntry {
            generation: i,
            slot: a,
            draw_id: id,
        });
    }
    cost.proposal_draws += (n * k) as u64;
    cost.density_evals += (n * k) as u64;
    Ok(ResampleOutcome::assemble(out, trace, cost))
}
