use std::io::{Read, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use smc_core::substream;

use crate::model::TrackingModel;
use crate::{wrap_angle, Measurement, TrackingError, TrackingParams, TrackingState};

/// Bound on re-simulation when a trajectory hits the origin.
pub const MAX_SIMULATION_ATTEMPTS: usize = 16;

/// Ground truth x_{0:T} and measurements y_{0:T}.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<TrackingState>,
    pub measurements: Vec<Measurement>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// One simulation attempt; fails if the target lands exactly on the origin.
pub fn simulate<R: Rng + ?Sized>(
    params: &TrackingParams,
    rng: &mut R,
) -> Result<Trajectory, TrackingError> {
    let model = TrackingModel::new(params.clone())?;
    let mut states = Vec::with_capacity(params.horizon + 1);
    let mut measurements = Vec::with_capacity(params.horizon + 1);
    let mut x = params.initial_state;
    for t in 0..=params.horizon {
        if t > 0 {
            x = model.sample_transition(&x, rng);
        }
        if x.is_at_origin() {
            return Err(TrackingError::Origin);
        }
        let exact = x.polar();
        let er: f64 = rng.sample(StandardNormal);
        let eb: f64 = rng.sample(StandardNormal);
        states.push(x);
        measurements.push(Measurement {
            range: exact.range + params.sigma_range * er,
            bearing: wrap_angle(exact.bearing + params.sigma_bearing * eb),
        });
    }
    Ok(Trajectory {
        states,
        measurements,
    })
}

/// Simulates with substream `[attempt]` of `seed`, moving to the next
/// substream whenever the trajectory passes through the origin.
pub fn simulate_seeded(params: &TrackingParams, seed: u64) -> Result<Trajectory, TrackingError> {
    for attempt in 0..MAX_SIMULATION_ATTEMPTS {
        match simulate(params, &mut substream(seed, &[attempt as u64])) {
            Err(TrackingError::Origin) => continue,
            other => return other,
        }
    }
    Err(TrackingError::OriginRetriesExhausted {
        attempts: MAX_SIMULATION_ATTEMPTS,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    t: usize,
    cx: f64,
    vx: f64,
    cy: f64,
    vy: f64,
    rho: f64,
    theta: f64,
}

/// Writes `t,cx,vx,cy,vy,rho,theta`, one row per step.
pub fn write_csv<W: Write>(trajectory: &Trajectory, writer: W) -> Result<(), TrackingError> {
    let mut w = csv::Writer::from_writer(writer);
    for (t, (x, y)) in trajectory.states.iter().zip(&trajectory.measurements).enumerate() {
        w.serialize(Row {
            t,
            cx: x.cx,
            vx: x.vx,
            cy: x.cy,
            vy: x.vy,
            rho: y.range,
            theta: y.bearing,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Trajectory, TrackingError> {
    let mut r = csv::Reader::from_reader(reader);
    let mut states = Vec::new();
    let mut measurements = Vec::new();
    for (i, row) in r.deserialize::<Row>().enumerate() {
        let row = row?;
        if row.t != i {
            return Err(TrackingError::CsvLayout { row: i });
        }
        states.push(TrackingState::new(row.cx, row.vx, row.cy, row.vy));
        measurements.push(Measurement {
            range: row.rho,
            bearing: row.theta,
        });
    }
    Ok(Trajectory {
        states,
        measurements,
    })
}
