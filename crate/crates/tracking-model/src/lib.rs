//! Range-bearing target tracking.
//!
//! The target moves with constant-velocity dynamics
//! x_t = F x_{t-1} + η, η ~ N(0, Q), with state `[c_x, v_x, c_y, v_y]`, and
//! is observed through its range and bearing corrupted by independent
//! Gaussian noise. The filter model is the bootstrap one: the proposal is
//! the transition, so importance weights reduce to the likelihood.

mod linalg;
mod model;
mod simulate;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use linalg::Mat4;
pub use model::{likelihood, transition_sample, TrackingModel};
pub use simulate::{read_csv, simulate, simulate_seeded, write_csv, Trajectory, MAX_SIMULATION_ATTEMPTS};

#[derive(Debug, Error)]
pub enum TrackingError {
    #[error("invalid tracking configuration: {0}")]
    Config(String),
    #[error("bearing is undefined for a target at the origin")]
    Origin,
    #[error("trajectory passed through the origin on every one of {attempts} attempts")]
    OriginRetriesExhausted { attempts: usize },
    #[error("trajectory csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("trajectory csv row {row}: expected t = {row}")]
    CsvLayout { row: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackingState {
    pub cx: f64,
    pub vx: f64,
    pub cy: f64,
    pub vy: f64,
}

impl TrackingState {
    pub const fn new(cx: f64, vx: f64, cy: f64, vy: f64) -> Self {
        Self { cx, vx, cy, vy }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.cx, self.vx, self.cy, self.vy]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_at_origin(&self) -> bool {
        self.cx == 0.0 && self.cy == 0.0
    }

    /// Noise-free polar observation of the position.
    pub fn polar(&self) -> Measurement {
        Measurement {
            range: self.cx.hypot(self.cy),
            bearing: self.cy.atan2(self.cx),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub range: f64,
    /// Radians in (-π, π].
    pub bearing: f64,
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingParams {
    pub sigma_range: f64,
    pub sigma_bearing: f64,
    pub transition: Mat4,
    pub process_cov: Mat4,
    pub horizon: usize,
    /// True state at t = 0; also the mean of the filter prior.
    pub initial_state: TrackingState,
    /// Covariance of the filter prior around `initial_state`.
    pub prior_cov: Mat4,
}

/// F = I_2 ⊗ [[1, 1], [0, 1]].
pub fn default_transition() -> Mat4 {
    linalg::kron_eye2([[1.0, 1.0], [0.0, 1.0]])
}

/// Q = 10 · I_2 ⊗ [[1/3, 1/2], [1/2, 1]].
pub fn default_process_cov() -> Mat4 {
    linalg::scale(&linalg::kron_eye2([[1.0 / 3.0, 0.5], [0.5, 1.0]]), 10.0)
}

impl Default for TrackingParams {
    fn default() -> Self {
        Self {
            sigma_range: 0.1,
            sigma_bearing: PI / 1800.0,
            transition: default_transition(),
            process_cov: default_process_cov(),
            horizon: 50,
            initial_state: TrackingState::new(100.0, 1.0, 100.0, 1.0),
            prior_cov: default_process_cov(),
        }
    }
}

impl TrackingParams {
    pub fn with_noise(mut self, sigma_range: f64, sigma_bearing: f64) -> Self {
        self.sigma_range = sigma_range;
        self.sigma_bearing = sigma_bearing;
        self
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<(), TrackingError> {
        self.factors().map(|_| ())
    }

    /// Cholesky factors of (Q, prior covariance).
    pub(crate) fn factors(&self) -> Result<(Mat4, Mat4), TrackingError> {
        if !(self.sigma_range > 0.0 && self.sigma_range.is_finite()) {
            return Err(TrackingError::Config(format!(
                "range noise std must be positive, got {}",
                self.sigma_range
            )));
        }
        if !(self.sigma_bearing > 0.0 && self.sigma_bearing.is_finite()) {
            return Err(TrackingError::Config(format!(
                "bearing noise std must be positive, got {}",
                self.sigma_bearing
            )));
        }
        if self.transition.iter().flatten().any(|x| !x.is_finite())
            || !self.initial_state.to_array().iter().all(|x| x.is_finite())
        {
            return Err(TrackingError::Config("non-finite transition or initial state".into()));
        }
        let q = linalg::psd_cholesky(&self.process_cov).ok_or_else(|| {
            TrackingError::Config("process covariance is not symmetric positive semi-definite".into())
        })?;
        let p = linalg::psd_cholesky(&self.prior_cov).ok_or_else(|| {
            TrackingError::Config("prior covariance is not symmetric positive semi-definite".into())
        })?;
        Ok((q, p))
    }
}
