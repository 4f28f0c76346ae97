use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smc_core::ResamplingScheme;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentTag {
    RmseVsK,
    RmseVsNoise,
    VarianceSweep,
    OracleCheck,
}

impl ExperimentTag {
    pub const ALL: [ExperimentTag; 4] = [
        Self::RmseVsK,
        Self::RmseVsNoise,
        Self::VarianceSweep,
        Self::OracleCheck,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::RmseVsK => "rmse_vs_k",
            Self::RmseVsNoise => "rmse_vs_noise",
            Self::VarianceSweep => "variance_sweep",
            Self::OracleCheck => "oracle_check",
        }
    }
}

impl fmt::Display for ExperimentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentTag {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown experiment tag {s:?}")))
    }
}

/// Scheme families accepted in `schemes`.
///
/// `Sis` filters with multinomial resampling but reports the weighted
/// estimate taken before resampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Sis,
    Sir,
    Isir,
    Sr,
    Nssr,
    Rm,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Sis => "sis",
            Self::Sir => "sir",
            Self::Isir => "isir",
            Self::Sr => "sr",
            Self::Nssr => "nssr",
            Self::Rm => "rm",
        }
    }

    pub fn takes_k(&self) -> bool {
        matches!(self, Self::Sr | Self::Nssr | Self::Rm)
    }
}

/// One concrete filter configuration inside an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub n: usize,
    pub k: Option<usize>,
}

impl SchemeSpec {
    pub fn new(kind: SchemeKind, n: usize, k: Option<usize>) -> Self {
        Self { kind, n, k }
    }

    pub fn resampling(&self) -> ResamplingScheme {
        let k = self.k.unwrap_or(0);
        match self.kind {
            SchemeKind::Sis | SchemeKind::Sir => ResamplingScheme::Multinomial,
            SchemeKind::Isir => ResamplingScheme::Independent,
            SchemeKind::Sr => ResamplingScheme::SemiIndependent(k),
            SchemeKind::Nssr => ResamplingScheme::NonSequential(k),
            SchemeKind::Rm => ResamplingScheme::ResampleMove(k),
        }
    }

    pub fn uses_weighted_estimate(&self) -> bool {
        self.kind == SchemeKind::Sis
    }

    /// Closed-form proposal draws per filtering step.
    pub fn cost_per_step(&self) -> u64 {
        self.resampling().proposal_draws_per_step(self.n)
    }

    pub fn label(&self) -> String {
        match self.k {
            Some(k) => format!("{}(N={},k={k})", self.kind.as_str(), self.n),
            None => format!("{}(N={})", self.kind.as_str(), self.n),
        }
    }
}

/// Experiment configuration, read from a flat TOML file.
///
/// Every key is optional; missing keys take the defaults below.
/// `sr_k`, `rm_k`, `nssr_k`, `isir_n` and `sis_n` are derived from `n`
/// when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentTag>,
    pub n: usize,
    pub k_list: Vec<usize>,
    /// Empty means the experiment's default list.
    pub schemes: Vec<SchemeKind>,
    pub runs: usize,
    pub horizon: usize,
    pub sigma_rho: f64,
    pub sigma_theta: f64,
    pub noise_points: usize,
    pub sigma_rho_range: [f64; 2],
    pub sigma_theta_range: [f64; 2],
    pub sr_k: Option<usize>,
    pub rm_k: Option<usize>,
    pub nssr_k: Option<usize>,
    pub isir_n: Option<usize>,
    pub sis_n: Option<usize>,
    pub seed: u64,
    pub shared_measurements: bool,
    pub include_velocity: bool,
    pub parallel_nssr: bool,
    pub replicates: usize,
    pub freeze_step: usize,
    pub oracle_particles: Vec<usize>,
    pub oracle_states: usize,
    pub oracle_instances: usize,
    pub oracle_replicates: usize,
    pub mutate: bool,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            n: 100,
            k_list: vec![0, 1, 2, 5, 10, 20, 30, 50, 80, 100],
            schemes: Vec::new(),
            runs: 1000,
            horizon: 50,
            sigma_rho: 0.1,
            sigma_theta: PI / 1800.0,
            noise_points: 8,
            sigma_rho_range: [0.01, 0.3],
            sigma_theta_range: [PI / 18000.0, PI / 600.0],
            sr_k: None,
            rm_k: None,
            nssr_k: None,
            isir_n: None,
            sis_n: None,
            seed: 20170901,
            shared_measurements: true,
            include_velocity: false,
            parallel_nssr: false,
            replicates: 20_000,
            freeze_step: 5,
            oracle_particles: vec![2, 3],
            oracle_states: 3,
            oracle_instances: 5,
            oracle_replicates: 100_000,
            mutate: false,
            out: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn sr_k(&self) -> usize {
        self.sr_k.unwrap_or(self.n / 2)
    }

    pub fn rm_k(&self) -> usize {
        self.rm_k.unwrap_or(self.n / 2)
    }

    pub fn nssr_k(&self) -> usize {
        self.nssr_k.unwrap_or(4 * self.n / 5)
    }

    /// Largest N' with N'² within the 2N + Nk budget.
    pub fn isir_n(&self) -> usize {
        self.isir_n.unwrap_or_else(|| {
            let budget = 2 * self.n + self.n * self.sr_k();
            let mut m = (budget as f64).sqrt() as usize;
            while m * m > budget {
                m -= 1;
            }
            while (m + 1) * (m + 1) <= budget {
                m += 1;
            }
            m
        })
    }

    /// N + (N - 1)k / 2 with k = `sr_k`.
    pub fn sis_n(&self) -> usize {
        self.sis_n
            .unwrap_or(self.n + self.n.saturating_sub(1) * self.sr_k() / 2)
    }

    pub fn schemes_or(&self, default: &[SchemeKind]) -> Vec<SchemeKind> {
        if self.schemes.is_empty() {
            default.to_vec()
        } else {
            self.schemes.clone()
        }
    }

    /// Jointly log-spaced (σ_ρ, σ_θ) pairs from the most to the least
    /// informative end of the ranges.
    pub fn noise_grid(&self) -> Vec<(f64, f64)> {
        let p = self.noise_points;
        let interp = |[lo, hi]: [f64; 2], i: usize| {
            if p == 1 {
                lo
            } else if i == 0 {
                lo
            } else if i == p - 1 {
                hi
            } else {
                (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (p - 1) as f64).exp()
            }
        };
        (0..p)
            .map(|i| (interp(self.sigma_rho_range, i), interp(self.sigma_theta_range, i)))
            .collect()
    }

    /// Checks invariants for the given experiment.
    pub fn validate(&self, tag: ExperimentTag) -> Result<()> {
        let fail = |msg: String| Err(BenchError::Config(msg));
        if let Some(t) = self.experiment {
            if t != tag {
                return fail(format!("config is for {t}, not {tag}"));
            }
        }
        if self.runs == 0 {
            return fail("runs must be at least 1".into());
        }
        match tag {
            ExperimentTag::OracleCheck => {
                if self.oracle_particles.is_empty() || self.oracle_instances == 0 {
                    return fail("oracle grid is empty".into());
                }
                if self.oracle_replicates == 0 {
                    return fail("oracle_replicates must be at least 1".into());
                }
                return Ok(());
            }
            ExperimentTag::VarianceSweep => {
                if self.replicates < 2 {
                    return fail("replicates must be at least 2".into());
                }
            }
            _ => {}
        }
        if self.n == 0 {
            return fail("n must be at least 1".into());
        }
        if self.horizon == 0 {
            return fail("horizon must be at least 1".into());
        }
        if !(self.sigma_rho > 0.0 && self.sigma_theta > 0.0)
            || !self.sigma_rho.is_finite()
            || !self.sigma_theta.is_finite()
        {
            return fail("noise levels must be positive and finite".into());
        }
        for (name, [lo, hi]) in [
            ("sigma_rho_range", self.sigma_rho_range),
            ("sigma_theta_range", self.sigma_theta_range),
        ] {
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return fail(format!("{name} must satisfy 0 < lo <= hi"));
            }
        }
        if tag == ExperimentTag::RmseVsNoise && self.noise_points == 0 {
            return fail("noise_points must be at least 1".into());
        }
        for &k in &self.k_list {
            if k > self.n {
                return fail(format!("k = {k} exceeds n = {}", self.n));
            }
        }
        for (name, k) in [("sr_k", self.sr_k()), ("rm_k", self.rm_k()), ("nssr_k", self.nssr_k())] {
            if k > self.n {
                return fail(format!("{name} = {k} exceeds n = {}", self.n));
            }
        }
        if self.isir_n() == 0 || self.sis_n() == 0 {
            return fail("derived particle counts must be positive".into());
        }
        if tag == ExperimentTag::VarianceSweep {
            if self.freeze_step == 0 || self.freeze_step >= self.horizon {
                return fail("freeze_step must lie in 1..horizon".into());
            }
            if self.schemes.iter().any(|s| matches!(s, SchemeKind::Sis | SchemeKind::Rm)) {
                return fail("variance_sweep supports sir, isir, sr and nssr".into());
            }
        }
        if tag == ExperimentTag::RmseVsK && self.schemes.contains(&SchemeKind::Rm) {
            return fail("rmse_vs_k supports sis, sir, isir, sr and nssr".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_budget_defaults() {
        let c = ExperimentConfig::default();
        assert_eq!(c.sr_k(), 50);
        assert_eq!(c.rm_k(), 50);
        assert_eq!(c.nssr_k(), 80);
        assert_eq!(c.isir_n(), 72);
        assert_eq!(c.sis_n(), 2575);
    }

    #[test]
    fn parses_flat_toml() {
        let c = ExperimentConfig::from_toml_str(
            "experiment = \"rmse_vs_k\"\nruns = 7\nschemes = [\"sis\", \"sr\"]\nk_list = [0, 3]\n",
        )
        .unwrap();
        assert_eq!(c.experiment, Some(ExperimentTag::RmseVsK));
        assert_eq!(c.runs, 7);
        assert_eq!(c.schemes, vec![SchemeKind::Sis, SchemeKind::Sr]);
        assert_eq!(c.n, 100);
        c.validate(ExperimentTag::RmseVsK).unwrap();
        assert!(c.validate(ExperimentTag::RmseVsNoise).is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml_str("bogus = 1").is_err());
        let mut c = ExperimentConfig {
            runs: 0,
            ..Default::default()
        };
        assert_eq!(c.validate(ExperimentTag::RmseVsK).unwrap_err().exit_code(), 2);
        c.runs = 1;
        c.sigma_rho_range = [0.0, 0.3];
        assert!(c.validate(ExperimentTag::RmseVsNoise).is_err());
        c.sigma_rho_range = [0.01, 0.3];
        c.k_list = vec![101];
        assert!(c.validate(ExperimentTag::RmseVsK).is_err());
    }

    #[test]
    fn noise_grid_endpoints() {
        let c = ExperimentConfig::default();
        let g = c.noise_grid();
        assert_eq!(g.len(), 8);
        assert_eq!(g[0], (0.01, PI / 18000.0));
        assert_eq!(g[7], (0.3, PI / 600.0));
        assert!(g.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
    }

    #[test]
    fn tags_round_trip() {
        for t in ExperimentTag::ALL {
            assert_eq!(t.as_str().parse::<ExperimentTag>().unwrap(), t);
        }
        assert!("rmse".parse::<ExperimentTag>().is_err());
    }
}
