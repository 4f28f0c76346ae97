use rand::Rng;
use rand_distr::StandardNormal;
use smc_core::StateSpaceModel;

use crate::linalg::{gaussian_logpdf_chol, mat_vec, Mat4};
use crate::{wrap_angle, Measurement, TrackingError, TrackingParams, TrackingState};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn gaussian_step<R: Rng + ?Sized>(mean: [f64; 4], chol: &Mat4, rng: &mut R) -> TrackingState {
    let z: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let noise = mat_vec(chol, &z);
    TrackingState::from_array(std::array::from_fn(|i| mean[i] + noise[i]))
}

/// One draw of F x + η with η ~ N(0, Q).
pub fn transition_sample<R: Rng + ?Sized>(
    x: &TrackingState,
    params: &TrackingParams,
    rng: &mut R,
) -> Result<TrackingState, TrackingError> {
    let (q_chol, _) = params.factors()?;
    Ok(gaussian_step(mat_vec(&params.transition, &x.to_array()), &q_chol, rng))
}

/// log g(y | x): independent Gaussian range and wrapped-bearing residuals.
pub fn likelihood(
    x: &TrackingState,
    y: &Measurement,
    params: &TrackingParams,
) -> Result<f64, TrackingError> {
    if x.is_at_origin() {
        return Err(TrackingError::Origin);
    }
    let predicted = x.polar();
    let dr = (y.range - predicted.range) / params.sigma_range;
    let db = wrap_angle(y.bearing - predicted.bearing) / params.sigma_bearing;
    Ok(-0.5 * (dr * dr + db * db) - (params.sigma_range * params.sigma_bearing).ln() - LN_2PI)
}

/// Bootstrap filter model for the tracking problem (q = f).
#[derive(Debug, Clone)]
pub struct TrackingModel {
    params: TrackingParams,
    q_chol: Mat4,
    prior_chol: Mat4,
}

impl TrackingModel {
    pub fn new(params: TrackingParams) -> Result<Self, TrackingError> {
        let (q_chol, prior_chol) = params.factors()?;
        Ok(Self {
            params,
            q_chol,
            prior_chol,
        })
    }

    pub fn params(&self) -> &TrackingParams {
        &self.params
    }

    pub fn sample_transition<R: Rng + ?Sized>(&self, x: &TrackingState, rng: &mut R) -> TrackingState {
        gaussian_step(mat_vec(&self.params.transition, &x.to_array()), &self.q_chol, rng)
    }
}

impl StateSpaceModel for TrackingModel {
    type State = TrackingState;
    type Observation = Measurement;

    fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> TrackingState {
        gaussian_step(self.params.initial_state.to_array(), &self.prior_chol, rng)
    }

    fn log_transition_density(&self, prev: &TrackingState, next: &TrackingState) -> f64 {
        let mean = mat_vec(&self.params.transition, &prev.to_array());
        let next = next.to_array();
        let r = std::array::from_fn(|i| next[i] - mean[i]);
        gaussian_logpdf_chol(&r, &self.q_chol)
    }

    /// The origin has probability zero under the continuous dynamics; it is
    /// given zero likelihood rather than an error.
    fn log_likelihood(&self, state: &TrackingState, obs: &Measurement) -> f64 {
        likelihood(state, obs, &self.params).unwrap_or(f64::NEG_INFINITY)
    }

    fn sample_proposal<R: Rng + ?Sized>(
        &self,
        prev: &TrackingState,
        _obs: &Measurement,
        rng: &mut R,
    ) -> TrackingState {
        self.sample_transition(prev, rng)
    }

    fn log_proposal_density(&self, prev: &TrackingState, next: &TrackingState, _obs: &Measurement) -> f64 {
        self.log_transition_density(prev, next)
    }

    fn log_incremental_weight(
        &self,
        _prev: &TrackingState,
        next: &TrackingState,
        obs: &Measurement,
    ) -> f64 {
        self.log_likelihood(next, obs)
    }
}
