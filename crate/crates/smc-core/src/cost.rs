use std::ops::{Add, AddAssign};

/// Work counters accumulated over one filter step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostLedger {
    /// Draws from the proposal q(x_t | x_{t-1}).
    pub proposal_draws: u64,
    /// Evaluations of the incremental weight f·g/q.
    pub density_evals: u64,
    /// Categorical (index) draws.
    pub categorical_draws: u64,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }
}

impl AddAssign for CostLedger {
    fn add_assign(&mut self, rhs: Self) {
        self.proposal_draws += rhs.proposal_draws;
        self.density_evals += rhs.density_evals;
        self.categorical_draws += rhs.categorical_draws;
    }
}

impl Add for CostLedger {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}
