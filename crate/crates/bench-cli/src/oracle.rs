//! Drives the exact oracle: proposition checks on random discrete models
//! and goodness-of-fit tests of the samplers.

use exact_oracle::{
    check_propositions, validate_sampler_against, DiscreteHmm, OracleError, EXACT_TOLERANCE,
    MAX_PARTICLES, MAX_STATES,
};
use rand::Rng;
use serde::Serialize;
use smc_core::{substream, ResamplingScheme};

use crate::config::{ExperimentConfig, ExperimentTag};
use crate::error::{BenchError, Result};
use crate::report::Check;

const INSTANCE_STREAM: u64 = 5;
const FIT_STREAM: u64 = 6;

/// Fits with a p-value at or below this fail.
pub const FIT_THRESHOLD: f64 = 1e-3;
/// A mutated sampler counts as detected below this p-value.
pub const MUTATION_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct InstanceResult {
    #[serde(rename = "N")]
    pub n: usize,
    pub instance: usize,
    pub verdicts: usize,
    pub failures: Vec<String>,
    /// Largest |mean difference| across schemes.
    pub max_mean_gap: f64,
    /// Largest variance under φ ≡ 1.
    pub constant_phi_variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub scheme: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub replicates: usize,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Set when the sampler produced an outcome of exact probability zero.
    pub impossible_outcome: bool,
    pub mutated: bool,
}

impl FitRow {
    pub fn detected(&self) -> bool {
        self.impossible_outcome || self.p_value < MUTATION_THRESHOLD
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub instances: Vec<InstanceResult>,
    pub fits: Vec<FitRow>,
    pub checks: Vec<Check>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        crate::report::all_passed(&self.checks)
    }
}

/// Every scheme fitted at size `n`: SIR, I-SIR, SR(0..=n), NSSR(0..=n) and
/// resample-move with one and two moves.
pub fn fitted_schemes(n: usize) -> Vec<ResamplingScheme> {
    let mut v = vec![ResamplingScheme::Multinomial, ResamplingScheme::Independent];
    v.extend((0..=n).map(ResamplingScheme::SemiIndependent));
    v.extend((0..=n).map(ResamplingScheme::NonSequential));
    v.extend([ResamplingScheme::ResampleMove(1), ResamplingScheme::ResampleMove(2)]);
    v
}

/// The seeded model for instance `i` at size `n`, with its test function.
pub fn instance(config: &ExperimentConfig, n: usize, i: usize) -> (DiscreteHmm, Vec<f64>) {
    let mut rng = substream(config.seed, &[INSTANCE_STREAM, n as u64, i as u64]);
    let model = DiscreteHmm::random(config.oracle_states, n, &mut rng);
    let phi = (0..config.oracle_states).map(|_| rng.random_range(-1.0..1.0)).collect();
    (model, phi)
}

fn fit_row(
    sampler: &DiscreteHmm,
    reference: &DiscreteHmm,
    scheme: ResamplingScheme,
    replicates: usize,
    rng: &mut smc_core::Stream,
    mutated: bool,
) -> Result<FitRow> {
    let n = reference.num_particles();
    match validate_sampler_against(sampler, reference, scheme, replicates, rng) {
        Ok(r) => Ok(FitRow {
            scheme: scheme.to_string(),
            n,
            replicates,
            chi_square: r.chi_square,
            degrees_of_freedom: r.degrees_of_freedom,
            p_value: r.p_value,
            impossible_outcome: false,
            mutated,
        }),
        Err(OracleError::ImpossibleOutcome { .. }) => Ok(FitRow {
            scheme: scheme.to_string(),
            n,
            replicates,
            chi_square: f64::INFINITY,
            degrees_of_freedom: 0,
            p_value: 0.0,
            impossible_outcome: true,
            mutated,
        }),
        Err(e) => Err(e.into()),
    }
}

/// Runs the proposition checks on `oracle_instances` models per size and
/// fits every sampler on the first instance of each size. With `mutate`,
/// the samplers run on a model whose likelihood table has two entries
/// swapped, so the fits are expected to fail.
pub fn run_oracle_check(config: &ExperimentConfig) -> Result<OracleReport> {
    config.validate(ExperimentTag::OracleCheck)?;
    for &n in &config.oracle_particles {
        if n == 0 || n > MAX_PARTICLES {
            return Err(BenchError::Config(format!(
                "oracle_particles entry {n} outside 1..={MAX_PARTICLES}"
            )));
        }
    }
    if config.oracle_states < 2 || config.oracle_states > MAX_STATES {
        return Err(BenchError::Config(format!(
            "oracle_states must lie in 2..={MAX_STATES}"
        )));
    }

    let mut instances = Vec::new();
    let mut fits = Vec::new();
    let mut checks = Vec::new();
    for &n in &config.oracle_particles {
        for i in 0..config.oracle_instances {
            let (model, phi) = instance(config, n, i);
            let report = check_propositions(&model, &phi)?;
            let means: Vec<f64> = report.moments.iter().map(|m| m.mean).collect();
            let max_mean_gap = means
                .iter()
                .flat_map(|a| means.iter().map(move |b| (a - b).abs()))
                .fold(0.0, f64::max);
            let ones = vec![1.0; config.oracle_states];
            let constant = check_propositions(&model, &ones)?;
            let constant_phi_variance = constant
                .moments
                .iter()
                .map(|m| m.variance.abs())
                .fold(0.0, f64::max);
            let failures: Vec<String> = report.failures().map(|v| v.claim.clone()).collect();
            checks.push(Check::new(
                format!("propositions N={n} instance {i}"),
                failures.is_empty(),
                format!("{} verdicts, {} failed", report.verdicts.len(), failures.len()),
            ));
            checks.push(Check::new(
                format!("constant phi N={n} instance {i}"),
                constant_phi_variance <= EXACT_TOLERANCE,
                format!("max variance {constant_phi_variance:e}"),
            ));
            instances.push(InstanceResult {
                n,
                instance: i,
                verdicts: report.verdicts.len(),
                failures,
                max_mean_gap,
                constant_phi_variance,
            });
        }

        let (reference, _) = instance(config, n, 0);
        let sampler = if config.mutate {
            reference.with_swapped_likelihood(0, 1)
        } else {
            reference.clone()
        };
        for (s, scheme) in fitted_schemes(n).into_iter().enumerate() {
            let mut rng = substream(config.seed, &[FIT_STREAM, n as u64, s as u64]);
            let row = fit_row(&sampler, &reference, scheme, config.oracle_replicates, &mut rng, config.mutate)?;
            checks.push(Check::new(
                format!("fit {scheme} N={n}"),
                !row.impossible_outcome && row.p_value > FIT_THRESHOLD,
                format!("chi2 = {:.3}, dof = {}, p = {:.3e}", row.chi_square, row.degrees_of_freedom, row.p_value),
            ));
            fits.push(row);
        }
    }
    Ok(OracleReport {
        instances,
        fits,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_oversized_grid() {
        let config = ExperimentConfig {
            oracle_particles: vec![4],
            ..Default::default()
        };
        assert_eq!(run_oracle_check(&config).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn small_grid_passes() {
        let config = ExperimentConfig {
            oracle_particles: vec![2],
            oracle_instances: 2,
            oracle_replicates: 20_000,
            ..Default::default()
        };
        let report = run_oracle_check(&config).unwrap();
        assert!(report.passed(), "{:#?}", report.checks);
        assert_eq!(report.fits.len(), fitted_schemes(2).len());
    }
}
