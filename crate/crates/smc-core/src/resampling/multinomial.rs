use rand::Rng;

use crate::cost::CostLedger;
use crate::particles::WeightedParticleSet;

use super::{draw, ResampleOutcome, SupportState, TraceEntry};

/// N independent categorical draws over a fixed support.
pub fn multinomial_resample<X: Clone, R: Rng + ?Sized>(
    set: &WeightedParticleSet<X>,
    rng: &mut R,
) -> ResampleOutcome<X> {
    let (particles, trace) = draws(set.particles(), set.weights(), |l| l as u64, rng);
    let cost = CostLedger {
        categorical_draws: set.len() as u64,
        ..CostLedger::default()
    };
    ResampleOutcome::assemble(particles, trace, cost)
}

pub(super) fn from_support<X: Clone, R: Rng + ?Sized>(
    support: &SupportState<X>,
    rng: &mut R,
) -> ResampleOutcome<X> {
    let (particles, trace) = draws(
        support.particles(),
        support.weights(),
        |l| support.draw_id(l),
        rng,
    );
    let cost = CostLedger {
        categorical_draws: support.len() as u64,
        ..CostLedger::default()
    };
    ResampleOutcome::assemble(particles, trace, cost)
}

fn draws<X: Clone, R: Rng + ?Sized>(
    particles: &[X],
    weights: &[f64],
    draw_id: impl Fn(usize) -> u64,
    rng: &mut R,
) -> (Vec<X>, Vec<TraceEntry>) {
    let n = particles.len();
    let mut out = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(n);
    for i in 0..n {
        let l = draw::categorical(weights, rng);
        out.push(particles[l].clone());
        trace.push(TraceEntry {
            generation: i,
            slot: l,
            draw_id: draw_id(l),
        });
    }
    (out, trace)
}
