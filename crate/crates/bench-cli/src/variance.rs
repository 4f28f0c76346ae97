//! Conditional variance of the post-resampling estimate given a frozen
//! ancestor set on the tracking model.

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;
use smc_core::{
    substream, Execution, ParticleFilter, ResamplePolicy, ResamplingScheme, SupportState,
    WeightedParticleSet,
};
use tracking_model::{simulate_seeded, Measurement, TrackingModel, TrackingParams, TrackingState};

use crate::config::{ExperimentConfig, ExperimentTag, SchemeKind, SchemeSpec};
use crate::error::Result;
use crate::report::Check;
use crate::stats::{summarize, z_score};

const TRAJECTORY_STREAM: u64 = 1;
const FREEZE_STREAM: u64 = 3;
const REPLICATE_STREAM: u64 = 4;

/// Slack, in standard errors of the difference, allowed on inequalities.
pub const SE_SLACK: f64 = 3.0;
/// Bound on pairwise mean z-statistics.
pub const MEAN_Z_BOUND: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRow {
    pub scheme: &'static str,
    pub k: Option<usize>,
    #[serde(rename = "N")]
    pub n: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub proposal_draws: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceReport {
    pub replicates: usize,
    pub freeze_step: usize,
    pub rows: Vec<VarianceRow>,
    pub max_abs_mean_z: f64,
    pub checks: Vec<Check>,
}

impl VarianceReport {
    pub fn row(&self, scheme: SchemeKind, k: Option<usize>) -> Option<&VarianceRow> {
        self.rows.iter().find(|r| r.scheme == scheme.as_str() && r.k == k)
    }

    pub fn passed(&self) -> bool {
        crate::report::all_passed(&self.checks)
    }

    pub fn checks_named<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name.starts_with(prefix))
    }
}

/// The frozen ancestor set and the observation that follows it.
pub struct FrozenStep {
    pub model: TrackingModel,
    pub ancestors: WeightedParticleSet<TrackingState>,
    pub observation: Measurement,
}

/// Runs a SIR filter with `config.n` particles up to `freeze_step` and keeps
/// its uniform output as the ancestor set.
pub fn freeze(config: &ExperimentConfig) -> Result<FrozenStep> {
    let params = TrackingParams::default()
        .with_horizon(config.horizon)
        .with_noise(config.sigma_rho, config.sigma_theta);
    params.validate()?;
    let model = TrackingModel::new(params.clone())?;
    let traj_seed = substream(config.seed, &[TRAJECTORY_STREAM, 0, 0]).next_u64();
    let traj = simulate_seeded(&params, traj_seed)?;
    let mut rng = substream(config.seed, &[FREEZE_STREAM]);
    let ys = &traj.measurements;
    let mut filter = ParticleFilter::initialize(
        &model,
        config.n,
        ResamplingScheme::Multinomial,
        ResamplePolicy::Always,
        &ys[0],
        &mut rng,
    )?;
    for y in &ys[1..=config.freeze_step] {
        filter.step(y, &mut rng)?;
    }
    let ancestors = filter.current().clone();
    Ok(FrozenStep {
        model,
        ancestors,
        observation: ys[config.freeze_step + 1],
    })
}

/// Empirical mean and variance of the c_x estimate over `replicates`
/// independent resampling steps from the frozen set.
pub fn replicate_estimates(
    frozen: &FrozenStep,
    scheme: ResamplingScheme,
    replicates: usize,
    seed: u64,
    stream: u64,
) -> Result<(Vec<f64>, u64)> {
    let results: Vec<(f64, u64)> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, &[REPLICATE_STREAM, stream, r as u64]);
            let support = SupportState::from_sis(
                &frozen.ancestors,
                &frozen.model,
                &frozen.observation,
                &mut rng,
            )?;
            let out = scheme.resample(
                &frozen.ancestors,
                &support,
                &frozen.model,
                &frozen.observation,
                &mut rng,
                Execution::Sequential,
            )?;
            Ok((out.resampled.estimate_post(|x| x.cx)?, out.cost.proposal_draws))
        })
        .collect::<Result<_>>()?;
    let cost = results.first().map_or(0, |r| r.1);
    let consistent = results.iter().all(|r| r.1 == cost);
    Ok((
        results.into_iter().map(|r| r.0).collect(),
        if consistent { cost } else { u64::MAX },
    ))
}

/// Repeats the resampling step from one frozen ancestor set and checks the
/// mean equalities and variance orderings with a 3·SE slack.
pub fn run_variance_sweep(config: &ExperimentConfig) -> Result<VarianceReport> {
    config.validate(ExperimentTag::VarianceSweep)?;
    let n = config.n;
    let kinds = config.schemes_or(&[SchemeKind::Sir, SchemeKind::Isir, SchemeKind::Sr, SchemeKind::Nssr]);
    let mut ks = config.k_list.clone();
    ks.sort_unstable();
    ks.dedup();
    let mut specs = Vec::new();
    for kind in kinds {
        if kind.takes_k() {
            specs.extend(ks.iter().map(|&k| SchemeSpec::new(kind, n, Some(k))));
        } else {
            specs.push(SchemeSpec::new(kind, n, None));
        }
    }

    let frozen = freeze(config)?;
    let mut rows = Vec::with_capacity(specs.len());
    let mut checks = Vec::new();
    for (s, spec) in specs.iter().enumerate() {
        let (estimates, cost) =
            replicate_estimates(&frozen, spec.resampling(), config.replicates, config.seed, s as u64)?;
        checks.push(Check::new(
            format!("cost {}", spec.label()),
            cost == spec.cost_per_step(),
            format!("{cost} vs closed form {}", spec.cost_per_step()),
        ));
        let summary = summarize(&estimates);
        rows.push(VarianceRow {
            scheme: spec.kind.as_str(),
            k: spec.k,
            n,
            mean: summary.mean,
            mean_se: summary.mean_se,
            variance: summary.variance,
            variance_se: summary.variance_se,
            proposal_draws: cost,
        });
    }

    let mut max_z: f64 = 0.0;
    let mut worst = String::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let z = z_score(a.mean, a.mean_se, b.mean, b.mean_se).abs();
            if z > max_z {
                max_z = z;
                worst = format!("{}({:?}) vs {}({:?})", a.scheme, a.k, b.scheme, b.k);
            }
        }
    }
    checks.push(Check::new(
        "mean_equality",
        max_z < MEAN_Z_BOUND,
        format!("max |z| = {max_z:.3} ({worst})"),
    ));

    let find = |kind: SchemeKind, k: Option<usize>| {
        rows.iter().find(|r| r.scheme == kind.as_str() && r.k == k)
    };
    // lhs <= rhs within SE_SLACK standard errors of the difference.
    let le = |name: String, lhs: &VarianceRow, rhs: &VarianceRow| {
        let slack = SE_SLACK * lhs.variance_se.hypot(rhs.variance_se);
        Check::new(
            name,
            lhs.variance <= rhs.variance + slack,
            format!(
                "{:.6e} <= {:.6e} + {:.3e} (z = {:.3})",
                lhs.variance,
                rhs.variance,
                slack,
                z_score(lhs.variance, lhs.variance_se, rhs.variance, rhs.variance_se)
            ),
        )
    };
    let sir = find(SchemeKind::Sir, None);
    let isir = find(SchemeKind::Isir, None);
    for kind in [SchemeKind::Sr, SchemeKind::Nssr] {
        let tag = kind.as_str();
        for (i, &k) in ks.iter().enumerate() {
            let Some(row) = find(kind, Some(k)) else { continue };
            if let Some(isir) = isir {
                checks.push(le(format!("sandwich_{tag} isir <= {tag}(k={k})"), isir, row));
            }
            if let Some(sir) = sir {
                checks.push(le(format!("sandwich_{tag} {tag}(k={k}) <= sir"), row, sir));
            }
            if i > 0 {
                if let Some(prev) = find(kind, Some(ks[i - 1])) {
                    checks.push(le(
                        format!("monotone_{tag} {tag}(k={k}) <= {tag}(k={})", ks[i - 1]),
                        row,
                        prev,
                    ));
                }
            }
        }
    }
    for &k in &ks {
        if let (Some(sr), Some(nssr)) = (find(SchemeKind::Sr, Some(k)), find(SchemeKind::Nssr, Some(k))) {
            checks.push(le(format!("sr_below_nssr k={k}"), sr, nssr));
        }
    }

    Ok(VarianceReport {
        replicates: config.replicates,
        freeze_step: config.freeze_step,
        rows,
        max_abs_mean_z: max_z,
        checks,
    })
}
