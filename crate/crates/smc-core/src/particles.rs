//! Weighted particle sets, estimators and the effective sample size.

use crate::error::{Result, SmcError};

/// Why a vector of log-weights could not be normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum NormalizeFailure {
    AllZero,
    Invalid { slot: usize, value: f64 },
}

/// Writes normalized linear weights into `out` and returns log Σ exp(lw).
/// Uses max-subtraction so that log-weights far below -745 survive.
pub(crate) fn normalize_log_weights(
    log_weights: &[f64],
    out: &mut [f64],
) -> std::result::Result<f64, NormalizeFailure> {
    debug_assert_eq!(log_weights.len(), out.len());
    let mut max = f64::NEG_INFINITY;
    for (slot, &lw) in log_weights.iter().enumerate() {
        if lw.is_nan() || lw == f64::INFINITY {
            return Err(NormalizeFailure::Invalid { slot, value: lw });
        }
        if lw > max {
            max = lw;
        }
    }
    if max == f64::NEG_INFINITY {
        return Err(NormalizeFailure::AllZero);
    }
    let mut total = 0.0;
    for (w, &lw) in out.iter_mut().zip(log_weights) {
        *w = (lw - max).exp();
        total += *w;
    }
    for w in out.iter_mut() {
        *w /= total;
    }
    Ok(max + total.ln())
}

pub(crate) fn normalize_error(
    failure: NormalizeFailure,
    generation: usize,
    log_weights: &[f64],
) -> SmcError {
    match failure {
        NormalizeFailure::AllZero => SmcError::Degenerate {
            generation,
            log_weights: log_weights.to_vec(),
        },
        NormalizeFailure::Invalid { slot, value } => SmcError::InvalidLogWeight { slot, value },
    }
}

/// An ordered set of particles with (possibly unnormalized) log-weights.
///
/// Slot order matters: slot `j` of a set produced by the SIS step descends
/// from slot `j` of the previous set.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedParticleSet<X> {
    particles: Vec<X>,
    log_weights: Vec<f64>,
    weights: Vec<f64>,
    log_normalizer: f64,
}

impl<X> WeightedParticleSet<X> {
    pub fn from_log_weights(particles: Vec<X>, log_weights: Vec<f64>) -> Result<Self> {
        if particles.is_empty() {
            return Err(SmcError::Empty);
        }
        if particles.len() != log_weights.len() {
            return Err(SmcError::LengthMismatch {
                particles: particles.len(),
                weights: log_weights.len(),
            });
        }
        let mut weights = vec![0.0; particles.len()];
        let log_normalizer = normalize_log_weights(&log_weights, &mut weights)
            .map_err(|f| normalize_error(f, 0, &log_weights))?;
        Ok(Self {
            particles,
            log_weights,
            weights,
            log_normalizer,
        })
    }

    /// Equal weights, each exactly `1/N`.
    pub fn uniform(particles: Vec<X>) -> Result<Self> {
        if particles.is_empty() {
            return Err(SmcError::Empty);
        }
        let n = particles.len();
        let log_w = -(n as f64).ln();
        Ok(Self {
            particles,
            log_weights: vec![log_w; n],
            weights: vec![1.0 / n as f64; n],
            log_normalizer: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particles(&self) -> &[X] {
        &self.particles
    }

    pub fn into_particles(self) -> Vec<X> {
        self.particles
    }

    /// Log-weights as supplied, before normalization.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Normalized weights, summing to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// log of the normalized weight of slot `j`.
    pub fn normalized_log_weight(&self, j: usize) -> f64 {
        self.log_weights[j] - self.log_normalizer
    }

    pub fn is_uniform(&self) -> bool {
        self.uniformity_violation().is_none()
    }

    fn uniformity_violation(&self) -> Option<(usize, f64)> {
        let target = 1.0 / self.len() as f64;
        self.weights
            .iter()
            .position(|w| (w - target).abs() > 1e-12)
            .map(|slot| (slot, self.weights[slot]))
    }

    /// Σ_i w^i φ(x^i), the importance-sampling estimate.
    pub fn estimate_sis<F>(&self, phi: F) -> Result<f64>
    where
        F: Fn(&X) -> f64,
    {
        let mut acc = 0.0;
        for (index, (x, w)) in self.particles.iter().zip(&self.weights).enumerate() {
            let value = phi(x);
            if !value.is_finite() {
                return Err(SmcError::NonFiniteEstimate { index, value });
            }
            acc += w * value;
        }
        Ok(acc)
    }

    /// (1/N) Σ_i φ(x^i) on a post-resampling set.
    pub fn estimate_post<F>(&self, phi: F) -> Result<f64>
    where
        F: Fn(&X) -> f64,
    {
        if let Some((slot, weight)) = self.uniformity_violation() {
            return Err(SmcError::NonUniformWeights { slot, weight });
        }
        let mut acc = 0.0;
        for (index, x) in self.particles.iter().enumerate() {
            let value = phi(x);
            if !value.is_finite() {
                return Err(SmcError::NonFiniteEstimate { index, value });
            }
            acc += value;
        }
        Ok(acc / self.len() as f64)
    }

    /// 1 / Σ (w^i)², between 1 and N.
    pub fn effective_sample_size(&self) -> f64 {
        1.0 / self.weights.iter().map(|w| w * w).sum::<f64>()
    }
}
