use std::path::PathBuf;
use std::process::ExitCode;

use bench_cli::{run_experiment, BenchError, ExperimentConfig, ExperimentTag};
use clap::Parser;

/// Runs one experiment and writes CSV and JSON results.
#[derive(Parser, Debug)]
#[command(name = "bench", version = bench_cli::report::VERSION)]
struct Cli {
    /// rmse_vs_k, rmse_vs_noise, variance_sweep or oracle_check
    experiment: String,
    /// TOML config file
    #[arg(long)]
    config: PathBuf,
    /// Overrides the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the Monte Carlo run count
    #[arg(long)]
    runs: Option<usize>,
    /// Overrides the output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<bool, BenchError> {
    let tag: ExperimentTag = cli.experiment.parse()?;
    let mut config = ExperimentConfig::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(runs) = cli.runs {
        config.runs = runs;
    }
    if let Some(out) = cli.out {
        config.out = out;
    }
    let out = config.out.clone();
    let summary = run_experiment(tag, &config, &out)?;
    for check in summary.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL {}: {}", check.name, check.detail);
    }
    println!("{}", summary.csv.display());
    println!("{}", summary.json.display());
    Ok(summary.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
