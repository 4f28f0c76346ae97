//! Experiment harness: RMSE against k and against measurement noise on the
//! tracking model, conditional-variance sweeps from a frozen ancestor set,
//! and the exact-oracle checks on small discrete models.

pub mod config;
pub mod error;
pub mod oracle;
pub mod report;
pub mod rmse;
pub mod stats;
pub mod variance;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, ExperimentTag, SchemeKind, SchemeSpec};
pub use error::{BenchError, Result};
pub use oracle::{run_oracle_check, OracleReport};
pub use report::Check;
pub use rmse::{run_rmse_vs_k, run_rmse_vs_noise, RmseReport, RmseRow};
pub use variance::{run_variance_sweep, VarianceReport, VarianceRow};

/// Paths written by [`run_experiment`] and whether every check passed.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub checks: Vec<Check>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        report::all_passed(&self.checks)
    }
}

/// Runs `tag` and writes `<out>/<tag>.csv` and `<out>/<tag>.json`.
pub fn run_experiment(tag: ExperimentTag, config: &ExperimentConfig, out: &Path) -> Result<RunSummary> {
    let name = tag.as_str();
    let (csv, json, checks) = match tag {
        ExperimentTag::RmseVsK | ExperimentTag::RmseVsNoise => {
            let r = if tag == ExperimentTag::RmseVsK {
                run_rmse_vs_k(config)?
            } else {
                run_rmse_vs_noise(config)?
            };
            (
                report::write_csv(out, name, &r.rows)?,
                report::write_summary(out, name, config, &r.checks, &r)?,
                r.checks,
            )
        }
        ExperimentTag::VarianceSweep => {
            let r = run_variance_sweep(config)?;
            (
                report::write_csv(out, name, &r.rows)?,
                report::write_summary(out, name, config, &r.checks, &r)?,
                r.checks,
            )
        }
        ExperimentTag::OracleCheck => {
            let r = run_oracle_check(config)?;
            (
                report::write_csv(out, name, &r.fits)?,
                report::write_summary(out, name, config, &r.checks, &r)?,
                r.checks,
            )
        }
    };
    Ok(RunSummary { csv, json, checks })
}
