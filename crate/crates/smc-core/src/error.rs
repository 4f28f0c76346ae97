use thiserror::Error;

/// Failures raised by particle-set construction, the SIS step and resampling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmcError {
    #[error("particle set must hold at least one particle")]
    Empty,

    #[error("{particles} particles but {weights} log-weights")]
    LengthMismatch { particles: usize, weights: usize },

    /// Every weight of a support is numerically zero. `generation` is the
    /// 0-based support index (0 is the SIS support).
    #[error("all weights vanished at support generation {generation}")]
    Degenerate {
        generation: usize,
        log_weights: Vec<f64>,
    },

    #[error("log-weight at slot {slot} is {value}, expected finite or -inf")]
    InvalidLogWeight { slot: usize, value: f64 },

    #[error("test function returned {value} at particle {index}")]
    NonFiniteEstimate { index: usize, value: f64 },

    #[error("rejuvenation count k = {k} outside 0..={n}")]
    InvalidRejuvenationCount { k: usize, n: usize },

    #[error("post-resampling estimate needs uniform weights, slot {slot} has {weight}")]
    NonUniformWeights { slot: usize, weight: f64 },
}

pub type Result<T, E = SmcError> = std::result::Result<T, E>;
