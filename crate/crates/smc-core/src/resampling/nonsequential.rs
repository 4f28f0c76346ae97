use rand::Rng;
use rayon::prelude::*;

use crate::error::{Result, SmcError};
use crate::model::StateSpaceModel;
use crate::particles::WeightedParticleSet;
use crate::rng::substream;

use super::{draw, Execution, ResampleOutcome, SupportState, TraceEntry};

/// Non-sequential semi-independent resampling NSSR(k).
///
/// Support `i > 0` is the SIS support with `k` uniformly chosen slots
/// redrawn, built independently of every other support. One seed is taken
/// from `rng`; support `i` then uses substream `i` of that seed for its
/// subset, its redraws and its index draw, so parallel and sequential
/// execution return identical outcomes.
pub fn nonsequential_resample<M, R>(
    prev: &WeightedParticleSet<M::State>,
    initial: &SupportState<M::State>,
    k: usize,
    model: &M,
    obs: &M::Observation,
    rng: &mut R,
    execution: Execution,
) -> Result<ResampleOutcome<M::State>>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    let n = initial.len();
    if k > n {
        return Err(SmcError::InvalidRejuvenationCount { k, n });
    }
    let step_seed: u64 = rng.random();

    let build = |i: usize| -> Result<(M::State, TraceEntry)> {
        let mut stream = substream(step_seed, &[i as u64]);
        let entry = |support: &SupportState<M::State>, l: usize| TraceEntry {
            generation: i,
            slot: l,
            draw_id: support.draw_id(l),
        };
        if i == 0 || k == 0 {
            let l = initial.draw_index(&mut stream);
            return Ok((initial.particles()[l].clone(), entry(initial, l)));
        }
        let mut support = initial.clone();
        let mut pool = Vec::with_capacity(n);
        let first_id = (n + (i - 1) * k) as u64;
        let chosen = draw::subset(&mut pool, n, k, &mut stream);
        for (offset, &j) in chosen.iter().enumerate() {
            support.redraw(j, prev, model, obs, &mut stream, first_id + offset as u64);
        }
        support.renormalize(i)?;
        let l = support.draw_index(&mut stream);
        Ok((support.particles()[l].clone(), entry(&support, l)))
    };

    let results: Vec<Result<(M::State, TraceEntry)>> = match execution {
        Execution::Sequential => (0..n).map(build).collect(),
        Execution::Parallel => (0..n).into_par_iter().map(build).collect(),
    };

    let mut out = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(n);
    for r in results {
        let (x, e) = r?;
        out.push(x);
        trace.push(e);
    }

    let mut cost = initial.cost();
    cost.categorical_draws += n as u64;
    cost.proposal_draws += ((n - 1) * k) as u64;
    cost.density_evals += ((n - 1) * k) as u64;
    Ok(ResampleOutcome::assemble(out, trace, cost))
}
