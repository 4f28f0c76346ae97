use rand::Rng;

use crate::cost::CostLedger;
use crate::error::Result;
use crate::model::StateSpaceModel;
use crate::particles::{normalize_error, normalize_log_weights, WeightedParticleSet};
use crate::sis::propagate;

use super::draw;

/// One support x̃^{i,1:N}: the weighted set an output particle is drawn from.
///
/// Slot `j` always holds a draw from q(·|x^j_{t-1}); rejuvenation replaces a
/// slot's particle but never its ancestor.
#[derive(Debug, Clone)]
pub struct SupportState<X> {
    particles: Vec<X>,
    log_increments: Vec<f64>,
    raw_log_weights: Vec<f64>,
    weights: Vec<f64>,
    draw_ids: Vec<u64>,
    generation: usize,
    cost: CostLedger,
}

impl<X: Clone> SupportState<X> {
    /// Runs the SIS step from `prev` and keeps the result as support 0.
    pub fn from_sis<M, R>(
        prev: &WeightedParticleSet<X>,
        model: &M,
        obs: &M::Observation,
        rng: &mut R,
    ) -> Result<Self>
    where
        M: StateSpaceModel<State = X>,
        R: Rng + ?Sized,
    {
        let mut cost = CostLedger::new();
        let p = propagate(prev, model, obs, rng, &mut cost);
        let n = p.particles.len();
        let mut support = Self {
            particles: p.particles,
            log_increments: p.log_increments,
            raw_log_weights: p.raw_log_weights,
            weights: vec![0.0; n],
            draw_ids: (0..n as u64).collect(),
            generation: 0,
            cost,
        };
        support.renormalize(0)?;
        Ok(support)
    }

    /// The SIS output {w̃^i, x̃^i} as a weighted set.
    pub fn sis_set(&self) -> WeightedParticleSet<X> {
        WeightedParticleSet::from_log_weights(self.particles.clone(), self.raw_log_weights.clone())
            .expect("support weights were validated on construction")
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particles(&self) -> &[X] {
        &self.particles
    }

    /// Normalized weights w̃^{i,:}.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Unnormalized log-weights log w̄^{i,:}.
    pub fn raw_log_weights(&self) -> &[f64] {
        &self.raw_log_weights
    }

    pub fn log_increments(&self) -> &[f64] {
        &self.log_increments
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Cost of building the initial support (the SIS step).
    pub fn cost(&self) -> CostLedger {
        self.cost
    }

    pub(crate) fn draw_id(&self, slot: usize) -> u64 {
        self.draw_ids[slot]
    }

    pub(crate) fn draw_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        draw::categorical(&self.weights, rng)
    }

    /// Replaces slot `j` by a fresh draw from q(·|x^j_{t-1}); weights are
    /// stale until [`Self::renormalize`].
    pub(crate) fn redraw<M, R>(
        &mut self,
        j: usize,
        prev: &WeightedParticleSet<X>,
        model: &M,
        obs: &M::Observation,
        rng: &mut R,
        draw_id: u64,
    ) where
        M: StateSpaceModel<State = X>,
        R: Rng + ?Sized,
    {
        let parent = &prev.particles()[j];
        let x = model.sample_proposal(parent, obs, rng);
        let incr = model.log_incremental_weight(parent, &x, obs);
        self.particles[j] = x;
        self.log_increments[j] = incr;
        self.raw_log_weights[j] = prev.normalized_log_weight(j) + incr;
        self.draw_ids[j] = draw_id;
    }

    /// Recomputes w̃ from all N raw weights.
    pub(crate) fn renormalize(&mut self, generation: usize) -> Result<()> {
        self.generation = generation;
        normalize_log_weights(&self.raw_log_weights, &mut self.weights)
            .map(|_| ())
            .map_err(|f| normalize_error(f, generation, &self.raw_log_weights))
    }
}
