//! Hidden-Markov state-space model contract.

use rand::Rng;

/// A state-space model with prior p(x_0), transition f, likelihood g and
/// importance proposal q, all evaluated in the log domain.
///
/// Densities are time-homogeneous; time-varying dynamics close over `t`
/// through the observation type. The proposal must dominate the target:
/// wherever `log_proposal_density` is `-inf`, the transition times the
/// likelihood must vanish as well.
pub trait StateSpaceModel: Sync {
    type State: Clone + Send + Sync;
    type Observation: Sync;

    fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::State;

    fn log_transition_density(&self, prev: &Self::State, next: &Self::State) -> f64;

    fn log_likelihood(&self, state: &Self::State, obs: &Self::Observation) -> f64;

    fn sample_proposal<R: Rng + ?Sized>(
        &self,
        prev: &Self::State,
        obs: &Self::Observation,
        rng: &mut R,
    ) -> Self::State;

    fn log_proposal_density(
        &self,
        prev: &Self::State,
        next: &Self::State,
        obs: &Self::Observation,
    ) -> f64;

    /// log[f(next|prev) g(obs|next) / q(next|prev)].
    ///
    /// Bootstrap models (q = f) should override this to return the
    /// likelihood alone.
    fn log_incremental_weight(
        &self,
        prev: &Self::State,
        next: &Self::State,
        obs: &Self::Observation,
    ) -> f64 {
        let log_q = self.log_proposal_density(prev, next, obs);
        if log_q == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let log_f = self.log_transition_density(prev, next);
        if log_f == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        log_f + self.log_likelihood(next, obs) - log_q
    }
}
