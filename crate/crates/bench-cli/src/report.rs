use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;

/// Crate version plus `git describe` output captured at build time.
pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "-", env!("BENCH_GIT_DESCRIBE"));

/// One named pass/fail check carried in every experiment summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    experiment: &'a str,
    version: &'static str,
    passed: bool,
    config: &'a ExperimentConfig,
    checks: &'a [Check],
    results: &'a T,
}

/// Writes `<dir>/<tag>.json` with the config echo, checks and results.
pub fn write_summary<T: Serialize>(
    dir: &Path,
    tag: &str,
    config: &ExperimentConfig,
    checks: &[Check],
    results: &T,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{tag}.json"));
    let summary = Summary {
        experiment: tag,
        version: VERSION,
        passed: all_passed(checks),
        config,
        checks,
        results,
    };
    let mut file = fs::File::create(&path)?;
    serde_json::to_writer_pretty(&mut file, &summary)?;
    writeln!(file)?;
    Ok(path)
}

/// Writes rows to `<dir>/<tag>.csv`.
pub fn write_csv<T: Serialize>(dir: &Path, tag: &str, rows: &[T]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{tag}.csv"));
    let mut w = csv::Writer::from_path(&path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(path)
}
