use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use smc_core::{Execution, ResamplingScheme, SupportState};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::enumerate::enumerate_law;
use crate::hmm::DiscreteHmm;
use crate::OracleError;

/// Cells whose expected count falls below this are pooled into one cell.
const MIN_EXPECTED_COUNT: f64 = 5.0;

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeDeviation {
    pub outcome: Vec<usize>,
    pub expected: f64,
    pub observed: f64,
    /// (observed - expected) / binomial standard error, in counts.
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub scheme: String,
    pub n: usize,
    pub replicates: usize,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub deviations: Vec<OutcomeDeviation>,
}

/// Runs the real sampler `replicates` times and compares its outcome
/// frequencies with the enumerated law.
pub fn validate_sampler<R: Rng + ?Sized>(
    model: &DiscreteHmm,
    scheme: ResamplingScheme,
    replicates: usize,
    rng: &mut R,
) -> Result<FitReport, OracleError> {
    validate_sampler_against(model, model, scheme, replicates, rng)
}

/// Like [`validate_sampler`], but samples from `sampler_model` while
/// comparing with the law enumerated on `reference`; used for mutation
/// tests.
pub fn validate_sampler_against<R: Rng + ?Sized>(
    sampler_model: &DiscreteHmm,
    reference: &DiscreteHmm,
    scheme: ResamplingScheme,
    replicates: usize,
    rng: &mut R,
) -> Result<FitReport, OracleError> {
    let law = enumerate_law(reference, scheme)?;
    let prev = sampler_model.previous_set();
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for _ in 0..replicates {
        let support = SupportState::from_sis(&prev, sampler_model, &(), rng)?;
        let out = scheme.resample(&prev, &support, sampler_model, &(), rng, Execution::Sequential)?;
        *counts.entry(out.resampled.into_particles()).or_default() += 1;
    }
    for outcome in counts.keys() {
        if law.probability(outcome) == 0.0 {
            return Err(OracleError::ImpossibleOutcome {
                outcome: outcome.clone(),
            });
        }
    }

    let total = replicates as f64;
    let mut chi_square = 0.0;
    let mut cells = 0usize;
    let (mut pooled_expected, mut pooled_observed) = (0.0, 0.0);
    let mut deviations = Vec::with_capacity(law.outcomes().len());
    for (p, outcome) in law.outcomes() {
        let expected = p * total;
        let observed = counts.get(outcome).copied().unwrap_or(0) as f64;
        let se = (total * p * (1.0 - p)).sqrt();
        deviations.push(OutcomeDeviation {
            outcome: outcome.clone(),
            expected,
            observed,
            z: if se > 0.0 { (observed - expected) / se } else { 0.0 },
        });
        if expected < MIN_EXPECTED_COUNT {
            pooled_expected += expected;
            pooled_observed += observed;
        } else {
            chi_square += (observed - expected).powi(2) / expected;
            cells += 1;
        }
    }
    if pooled_expected > 0.0 {
        chi_square += (pooled_observed - pooled_expected).powi(2) / pooled_expected;
        cells += 1;
    }
    let degrees_of_freedom = cells.saturating_sub(1);
    let p_value = if degrees_of_freedom == 0 {
        1.0
    } else {
        ChiSquared::new(degrees_of_freedom as f64)
            .expect("positive degrees of freedom")
            .sf(chi_square)
    };
    Ok(FitReport {
        scheme: scheme.to_string(),
        n: reference.num_particles(),
        replicates,
        chi_square,
        degrees_of_freedom,
        p_value,
        deviations,
    })
}
