use rand::Rng;

use crate::error::{Result, SmcError};
use crate::model::StateSpaceModel;
use crate::particles::WeightedParticleSet;

use super::{draw, ResampleOutcome, SupportState, TraceEntry};

/// Semi-independent resampling SR(k).
///
/// Output `i` is drawn from support `i`; support `i+1` copies support `i`
/// and redraws `k` uniformly chosen slots from their own ancestors. Costs
/// (N-1)k proposal draws on top of the N SIS draws. `k = 0` consumes the
/// stream exactly like multinomial resampling.
pub fn semi_independent_resample<M, R>(
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
    if k > n {
        return Err(SmcError::InvalidRejuvenationCount { k, n });
    }
    let mut support = initial.clone();
    let mut cost = initial.cost();
    let mut out = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(n);
    let mut pool = Vec::with_capacity(n);
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

        if i + 1 < n && k > 0 {
            for &j in draw::subset(&mut pool, n, k, rng) {
                support.redraw(j, prev, model, obs, rng, next_id);
                next_id += 1;
            }
            cost.proposal_draws += k as u64;
            cost.density_evals += k as u64;
            support.renormalize(i + 1)?;
        }
    }
    Ok(ResampleOutcome::assemble(out, trace, cost))
}
