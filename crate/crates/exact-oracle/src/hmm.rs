use rand::Rng;
use smc_core::resampling::categorical;
use smc_core::{StateSpaceModel, WeightedParticleSet};

use crate::OracleError;

/// A finite-state model frozen at one filter step: the previous weighted
/// particles, tabulated transition f, proposal q and the likelihood g of the
/// fixed current observation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteHmm {
    transition: Vec<Vec<f64>>,
    proposal: Vec<Vec<f64>>,
    likelihood: Vec<f64>,
    ancestors: Vec<usize>,
    ancestor_weights: Vec<f64>,
}

fn check_rows(name: &str, rows: &[Vec<f64>], s: usize) -> Result<(), OracleError> {
    if rows.len() != s {
        return Err(OracleError::InvalidModel(format!("{name} has {} rows, expected {s}", rows.len())));
    }
    for (a, row) in rows.iter().enumerate() {
        if row.len() != s || row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(OracleError::InvalidModel(format!("{name} row {a} is not a probability vector")));
        }
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(OracleError::InvalidModel(format!("{name} row {a} sums to {total}")));
        }
    }
    Ok(())
}

impl DiscreteHmm {
    pub fn new(
        transition: Vec<Vec<f64>>,
        proposal: Vec<Vec<f64>>,
        likelihood: Vec<f64>,
        ancestors: Vec<usize>,
        ancestor_weights: Vec<f64>,
    ) -> Result<Self, OracleError> {
        let s = likelihood.len();
        if s == 0 {
            return Err(OracleError::InvalidModel("empty state alphabet".into()));
        }
        check_rows("transition", &transition, s)?;
        check_rows("proposal", &proposal, s)?;
        if likelihood.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(OracleError::InvalidModel("likelihood values must be finite and >= 0".into()));
        }
        for a in 0..s {
            for x in 0..s {
                if proposal[a][x] == 0.0 && transition[a][x] * likelihood[x] > 0.0 {
                    return Err(OracleError::InvalidModel(format!(
                        "proposal misses target mass at ({a} -> {x})"
                    )));
                }
            }
        }
        if ancestors.is_empty() || ancestors.len() != ancestor_weights.len() {
            return Err(OracleError::InvalidModel("ancestor states and weights must match and be non-empty".into()));
        }
        if ancestors.iter().any(|&a| a >= s) {
            return Err(OracleError::InvalidModel("ancestor state outside the alphabet".into()));
        }
        let total: f64 = ancestor_weights.iter().sum();
        if ancestor_weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || total <= 0.0 {
            return Err(OracleError::InvalidModel("ancestor weights must be non-negative with positive sum".into()));
        }
        let ancestor_weights = ancestor_weights.iter().map(|w| w / total).collect();
        Ok(Self {
            transition,
            proposal,
            likelihood,
            ancestors,
            ancestor_weights,
        })
    }

    /// Random instance with strictly positive tables. Likelihood values are
    /// spread over [0.02, 1] so that supports are informative.
    pub fn random<R: Rng + ?Sized>(num_states: usize, num_particles: usize, rng: &mut R) -> Self {
        let row = |rng: &mut R| {
            let raw: Vec<f64> = (0..num_states).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mut row: Vec<f64> = raw.iter().map(|x| x / total).collect();
            // force the exact unit sum the validator checks
            let head: f64 = row[..num_states - 1].iter().sum();
            row[num_states - 1] = 1.0 - head;
            row
        };
        let transition = (0..num_states).map(|_| row(rng)).collect();
        let proposal = (0..num_states).map(|_| row(rng)).collect();
        let likelihood = (0..num_states).map(|_| rng.random_range(0.02..1.0)).collect();
        let ancestors = (0..num_particles).map(|_| rng.random_range(0..num_states)).collect();
        let weights = (0..num_particles).map(|_| rng.random_range(0.1..1.0)).collect();
        Self::new(transition, proposal, likelihood, ancestors, weights)
            .expect("random tables are valid by construction")
    }

    /// Same model with likelihood entries `a` and `b` exchanged.
    pub fn with_swapped_likelihood(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        out.likelihood.swap(a, b);
        out
    }

    pub fn num_states(&self) -> usize {
        self.likelihood.len()
    }

    pub fn num_particles(&self) -> usize {
        self.ancestors.len()
    }

    pub fn ancestors(&self) -> &[usize] {
        &self.ancestors
    }

    pub fn transition(&self, from: usize, to: usize) -> f64 {
        self.transition[from][to]
    }

    pub fn proposal(&self, from: usize, to: usize) -> f64 {
        self.proposal[from][to]
    }

    pub fn likelihood(&self, state: usize) -> f64 {
        self.likelihood[state]
    }

    /// The frozen previous particle set {w_{t-1}^j, x_{t-1}^j}.
    pub fn previous_set(&self) -> WeightedParticleSet<usize> {
        let lw = self.ancestor_weights.iter().map(|w| w.ln()).collect();
        WeightedParticleSet::from_log_weights(self.ancestors.clone(), lw)
            .expect("ancestor weights validated on construction")
    }

    /// f(s|a) g(s) / q(s|a), zero outside the proposal support.
    pub fn importance_ratio(&self, ancestor_state: usize, state: usize) -> f64 {
        let q = self.proposal[ancestor_state][state];
        if q == 0.0 {
            return 0.0;
        }
        self.transition[ancestor_state][state] * self.likelihood[state] / q
    }

    /// Unnormalized SIS weight w̄ of slot `j` holding `state`.
    pub fn slot_weight(&self, j: usize, state: usize) -> f64 {
        self.ancestor_weights[j] * self.importance_ratio(self.ancestors[j], state)
    }
}

impl StateSpaceModel for DiscreteHmm {
    type State = usize;
    type Observation = ();

    fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.num_states())
    }

    fn log_transition_density(&self, prev: &usize, next: &usize) -> f64 {
        self.transition[*prev][*next].ln()
    }

    fn log_likelihood(&self, state: &usize, _obs: &()) -> f64 {
        self.likelihood[*state].ln()
    }

    fn sample_proposal<R: Rng + ?Sized>(&self, prev: &usize, _obs: &(), rng: &mut R) -> usize {
        categorical(&self.proposal[*prev], rng)
    }

    fn log_proposal_density(&self, prev: &usize, next: &usize, _obs: &()) -> f64 {
        self.proposal[*prev][*next].ln()
    }
}
