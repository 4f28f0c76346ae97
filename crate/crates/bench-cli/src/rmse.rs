//! Filtering runs on the tracking model and the two RMSE experiments.

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;
use smc_core::{
    substream, Execution, ParticleFilter, ResamplePolicy, SmcError, WeightedParticleSet,
};
use tracking_model::{simulate_seeded, TrackingModel, TrackingParams, TrackingState, Trajectory};

use crate::config::{ExperimentConfig, ExperimentTag, SchemeKind, SchemeSpec};
use crate::error::{BenchError, Result};
use crate::report::Check;
use crate::stats::{summarize, z_score};

const TRAJECTORY_STREAM: u64 = 1;
const FILTER_STREAM: u64 = 2;

/// One Monte Carlo run of one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// `None` when the weights degenerated at some step.
    pub rmse: Option<f64>,
    /// Proposal draws of every filtering step after initialization.
    pub step_costs: Vec<u64>,
}

/// Filters `trajectory` with `spec`, resampling at every step.
///
/// The per-run RMSE is the square root of the time average over t = 1..T of
/// the squared position error (plus velocity error when requested).
pub fn run_filter(
    model: &TrackingModel,
    trajectory: &Trajectory,
    spec: &SchemeSpec,
    include_velocity: bool,
    execution: Execution,
    rng: &mut impl rand::Rng,
) -> Result<RunOutcome> {
    let degenerate = RunOutcome {
        rmse: None,
        step_costs: Vec::new(),
    };
    let ys = &trajectory.measurements;
    let mut filter = match ParticleFilter::initialize(
        model,
        spec.n,
        spec.resampling(),
        ResamplePolicy::Always,
        &ys[0],
        rng,
    ) {
        Ok(f) => f.with_execution(execution),
        Err(SmcError::Degenerate { .. }) => return Ok(degenerate),
        Err(e) => return Err(e.into()),
    };
    let mut sq = 0.0;
    let mut step_costs = Vec::with_capacity(ys.len() - 1);
    for t in 1..ys.len() {
        let report = match filter.step(&ys[t], rng) {
            Ok(r) => r,
            Err(SmcError::Degenerate { .. }) => return Ok(degenerate),
            Err(e) => return Err(e.into()),
        };
        step_costs.push(report.cost.proposal_draws);
        let set = if spec.uses_weighted_estimate() {
            &report.weighted
        } else {
            report.current()
        };
        sq += squared_error(set, &trajectory.states[t], include_velocity);
    }
    Ok(RunOutcome {
        rmse: Some((sq / (ys.len() - 1) as f64).sqrt()),
        step_costs,
    })
}

fn squared_error(set: &WeightedParticleSet<TrackingState>, truth: &TrackingState, velocity: bool) -> f64 {
    let mut mean = [0.0; 4];
    for (x, w) in set.particles().iter().zip(set.weights()) {
        for (m, v) in mean.iter_mut().zip(x.to_array()) {
            *m += w * v;
        }
    }
    let truth = truth.to_array();
    let comps: &[usize] = if velocity { &[0, 1, 2, 3] } else { &[0, 2] };
    comps.iter().map(|&i| (mean[i] - truth[i]).powi(2)).sum()
}

/// One CSV row: a scheme at one (k, noise) point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmseRow {
    pub scheme: &'static str,
    pub k: Option<usize>,
    #[serde(rename = "N")]
    pub n: usize,
    pub sigma_rho: f64,
    pub sigma_theta: f64,
    /// Mean per-run RMSE over surviving runs.
    pub rmse: f64,
    /// Standard error of `rmse` across surviving runs.
    pub stderr: f64,
    pub degenerate_runs: usize,
    /// Mean proposal draws per step over surviving runs.
    pub proposal_draws: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmseReport {
    pub runs: usize,
    pub horizon: usize,
    pub rows: Vec<RmseRow>,
    /// Flags the rows that are not budget matched.
    pub not_budget_matched: Vec<String>,
    pub checks: Vec<Check>,
}

impl RmseReport {
    pub fn row(&self, scheme: SchemeKind, k: Option<usize>, grid_index: usize) -> Option<&RmseRow> {
        self.rows
            .iter()
            .filter(|r| r.scheme == scheme.as_str() && r.k == k)
            .nth(grid_index)
    }

    pub fn passed(&self) -> bool {
        crate::report::all_passed(&self.checks)
    }
}

fn measurement_seed(config: &ExperimentConfig, grid: usize, run: usize) -> u64 {
    let run = if config.shared_measurements { 0 } else { run as u64 + 1 };
    substream(config.seed, &[TRAJECTORY_STREAM, grid as u64, run]).next_u64()
}

/// Runs every spec over `config.runs` runs at one noise level.
fn sweep_point(
    config: &ExperimentConfig,
    params: &TrackingParams,
    grid: usize,
    specs: &[SchemeSpec],
    rows: &mut Vec<RmseRow>,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let model = TrackingModel::new(params.clone())?;
    let trajectories: Vec<Trajectory> = if config.shared_measurements {
        vec![simulate_seeded(params, measurement_seed(config, grid, 0))?]
    } else {
        (0..config.runs)
            .map(|r| simulate_seeded(params, measurement_seed(config, grid, r)))
            .collect::<std::result::Result<_, _>>()?
    };
    let execution = if config.parallel_nssr {
        Execution::Parallel
    } else {
        Execution::Sequential
    };
    for (s, spec) in specs.iter().enumerate() {
        let outcomes: Vec<RunOutcome> = (0..config.runs)
            .into_par_iter()
            .map(|r| {
                let traj = &trajectories[if config.shared_measurements { 0 } else { r }];
                let mut rng = substream(config.seed, &[FILTER_STREAM, grid as u64, s as u64, r as u64]);
                run_filter(&model, traj, spec, config.include_velocity, execution, &mut rng)
            })
            .collect::<Result<_>>()?;

        let rmses: Vec<f64> = outcomes.iter().filter_map(|o| o.rmse).collect();
        if rmses.is_empty() {
            return Err(BenchError::AllRunsDegenerate {
                scheme: spec.label(),
            });
        }
        let expected = spec.cost_per_step();
        let costs: Vec<u64> = outcomes
            .iter()
            .filter(|o| o.rmse.is_some())
            .flat_map(|o| o.step_costs.iter().copied())
            .collect();
        let total: u64 = costs.iter().sum();
        let mean_cost = total as f64 / costs.len() as f64;
        checks.push(Check::new(
            format!("cost {} grid {grid}", spec.label()),
            costs.iter().all(|&c| c == expected),
            format!("mean {mean_cost}, closed form {expected}"),
        ));
        let summary = summarize(&rmses);
        rows.push(RmseRow {
            scheme: spec.kind.as_str(),
            k: spec.k,
            n: spec.n,
            sigma_rho: params.sigma_range,
            sigma_theta: params.sigma_bearing,
            rmse: summary.mean,
            stderr: summary.mean_se,
            degenerate_runs: outcomes.len() - rmses.len(),
            proposal_draws: mean_cost,
        });
    }
    Ok(())
}

fn base_params(config: &ExperimentConfig) -> TrackingParams {
    TrackingParams::default().with_horizon(config.horizon)
}

/// RMSE as a function of k at fixed N and noise.
pub fn run_rmse_vs_k(config: &ExperimentConfig) -> Result<RmseReport> {
    config.validate(ExperimentTag::RmseVsK)?;
    let kinds = config.schemes_or(&[
        SchemeKind::Sis,
        SchemeKind::Sir,
        SchemeKind::Isir,
        SchemeKind::Sr,
        SchemeKind::Nssr,
    ]);
    let n = config.n;
    let mut specs = Vec::new();
    for kind in kinds {
        if kind.takes_k() {
            specs.extend(config.k_list.iter().map(|&k| SchemeSpec::new(kind, n, Some(k))));
        } else {
            specs.push(SchemeSpec::new(kind, n, None));
        }
    }
    let params = base_params(config).with_noise(config.sigma_rho, config.sigma_theta);
    params.validate()?;
    let (mut rows, mut checks) = (Vec::new(), Vec::new());
    sweep_point(config, &params, 0, &specs, &mut rows, &mut checks)?;

    let find = |kind: SchemeKind, k: Option<usize>| {
        rows.iter().find(|r| r.scheme == kind.as_str() && r.k == k)
    };
    for kind in [SchemeKind::Sr, SchemeKind::Nssr] {
        for (k, reference) in [(0, SchemeKind::Sir), (n, SchemeKind::Isir)] {
            if let (Some(a), Some(b)) = (find(kind, Some(k)), find(reference, None)) {
                let overlap = (a.rmse - b.rmse).abs() <= 2.0 * (a.stderr + b.stderr);
                checks.push(Check::new(
                    format!("reduction {}(k={k}) vs {}", kind.as_str(), reference.as_str()),
                    overlap,
                    format!(
                        "{:.6} ± {:.6} vs {:.6} ± {:.6}, z = {:.3}",
                        a.rmse,
                        2.0 * a.stderr,
                        b.rmse,
                        2.0 * b.stderr,
                        z_score(a.rmse, a.stderr, b.rmse, b.stderr)
                    ),
                ));
            }
        }
    }
    Ok(RmseReport {
        runs: config.runs,
        horizon: config.horizon,
        rows,
        not_budget_matched: Vec::new(),
        checks,
    })
}

/// RMSE over the noise grid at matched sampling budget.
pub fn run_rmse_vs_noise(config: &ExperimentConfig) -> Result<RmseReport> {
    config.validate(ExperimentTag::RmseVsNoise)?;
    let kinds = config.schemes_or(&[
        SchemeKind::Sis,
        SchemeKind::Sr,
        SchemeKind::Rm,
        SchemeKind::Isir,
        SchemeKind::Nssr,
    ]);
    let n = config.n;
    let mut not_budget_matched = Vec::new();
    let specs: Vec<SchemeSpec> = kinds
        .iter()
        .map(|&kind| match kind {
            SchemeKind::Sis | SchemeKind::Sir => SchemeSpec::new(kind, config.sis_n(), None),
            SchemeKind::Isir => SchemeSpec::new(kind, config.isir_n(), None),
            SchemeKind::Sr => SchemeSpec::new(kind, n, Some(config.sr_k())),
            SchemeKind::Rm => SchemeSpec::new(kind, n, Some(config.rm_k())),
            SchemeKind::Nssr => SchemeSpec::new(kind, n, Some(config.nssr_k())),
        })
        .collect();
    for spec in &specs {
        if spec.kind == SchemeKind::Nssr {
            not_budget_matched.push(spec.label());
        }
    }
    let (mut rows, mut checks) = (Vec::new(), Vec::new());
    for (g, (sr, st)) in config.noise_grid().into_iter().enumerate() {
        let params = base_params(config).with_noise(sr, st);
        params.validate()?;
        sweep_point(config, &params, g, &specs, &mut rows, &mut checks)?;
    }
    Ok(RmseReport {
        runs: config.runs,
        horizon: config.horizon,
        rows,
        not_budget_matched,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentConfig {
        ExperimentConfig {
            n: 10,
            k_list: vec![0, 5, 10],
            runs: 4,
            horizon: 5,
            ..Default::default()
        }
    }

    #[test]
    fn rows_cover_every_spec() {
        let r = run_rmse_vs_k(&tiny()).unwrap();
        // sis, sir, isir + 3 sr + 3 nssr
        assert_eq!(r.rows.len(), 9);
        assert!(r.rows.iter().all(|row| row.rmse >= 0.0 && row.degenerate_runs == 0));
        assert_eq!(r.row(SchemeKind::Sr, Some(5), 0).unwrap().proposal_draws, 10.0 + 9.0 * 5.0);
        assert_eq!(r.row(SchemeKind::Isir, None, 0).unwrap().proposal_draws, 100.0);
    }

    #[test]
    fn shared_measurements_seed_ignores_run() {
        let c = tiny();
        assert_eq!(measurement_seed(&c, 0, 0), measurement_seed(&c, 0, 3));
        let c = ExperimentConfig {
            shared_measurements: false,
            ..c
        };
        assert_ne!(measurement_seed(&c, 0, 0), measurement_seed(&c, 0, 3));
    }

    #[test]
    fn weighted_estimate_uses_weights() {
        let truth = TrackingState::new(0.0, 0.0, 0.0, 0.0);
        let set = WeightedParticleSet::from_log_weights(
            vec![TrackingState::new(1.0, 0.0, 0.0, 0.0), TrackingState::new(3.0, 0.0, 2.0, 5.0)],
            vec![0.0, 3f64.ln()],
        )
        .unwrap();
        // mean = (2.5, 0, 1.5, 3.75)
        assert!((squared_error(&set, &truth, false) - (6.25 + 2.25)).abs() < 1e-12);
        assert!((squared_error(&set, &truth, true) - (6.25 + 2.25 + 14.0625)).abs() < 1e-12);
    }
}
