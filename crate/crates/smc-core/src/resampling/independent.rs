use rand::Rng;

use crate::error::Result;
use crate::model::StateSpaceModel;
use crate::particles::WeightedParticleSet;

use super::{ResampleOutcome, SupportState, TraceEntry};

/// Independent resampling: a whole new support between consecutive outputs,
/// so the outputs are i.i.d. given the ancestors. Costs N(N-1) proposal
/// draws on top of SIS.
pub fn independent_resample<M, R>(
    prev: &WeightedParticleSet<M::State>,
    initial: &SupportState<M::State>,
    model: &M,
    obs: &M::Observation,
    rng: &mut R,
) -> Result<ResampleOutcome<M::State>>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    let n = initial.len();
    let mut support = initial.clone();
    let mut cost = initial.cost();
    let mut out = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(n);
    let mut next_id = n as u64;

    for i in 0..n {
        let l = support.draw_index(rng);
        cost.categorical_draws += 1;
        out.push(support.particles()[l].clone());
        trace.push(TraceEntry {
            generation: i,
            slot: l,
            draw_id: support.draw_id(l),
        });

        if i + 1 < n {
            for j in 0..n {
                support.redraw(j, prev, model, obs, rng, next_id);
                next_id += 1;
            }
            cost.proposal_draws += n as u64;
            cost.density_evals += n as u64;
            support.renormalize(i + 1)?;
        }
    }
    Ok(ResampleOutcome::assemble(out, trace, cost))
}
