use std::fs;
use std::path::Path;
use std::process::Command;

use bench_cli::config::{ExperimentConfig, ExperimentTag, SchemeKind};
use bench_cli::{run_experiment, run_rmse_vs_k, run_rmse_vs_noise};

fn small() -> ExperimentConfig {
    ExperimentConfig {
        n: 12,
        k_list: vec![0, 6, 12],
        runs: 8,
        horizon: 5,
        noise_points: 2,
        ..Default::default()
    }
}

fn bench(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bench")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn csv_header_and_rerun_identity() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_experiment(ExperimentTag::RmseVsK, &small(), &dir.path().join("a")).unwrap();
    let b = run_experiment(ExperimentTag::RmseVsK, &small(), &dir.path().join("b")).unwrap();
    let text = fs::read_to_string(&a.csv).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "scheme,k,N,sigma_rho,sigma_theta,rmse,stderr,degenerate_runs,proposal_draws"
    );
    assert_eq!(text, fs::read_to_string(&b.csv).unwrap());
    assert!(a.passed());
}

#[test]
fn other_seed_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_experiment(ExperimentTag::RmseVsK, &small(), &dir.path().join("a")).unwrap();
    let other = ExperimentConfig { seed: 1, ..small() };
    let b = run_experiment(ExperimentTag::RmseVsK, &other, &dir.path().join("b")).unwrap();
    assert_ne!(fs::read(a.csv).unwrap(), fs::read(b.csv).unwrap());
}

#[test]
fn mean_cost_equals_closed_form() {
    let report = run_rmse_vs_noise(&small()).unwrap();
    for row in &report.rows {
        let n = row.n as f64;
        let k = row.k.unwrap_or(0) as f64;
        let expected = match row.scheme {
            "sis" | "sir" => n,
            "isir" => n * n,
            "sr" | "nssr" => n + (n - 1.0) * k,
            "rm" => n + n * k,
            other => panic!("unexpected scheme {other}"),
        };
        assert_eq!(row.proposal_draws, expected, "{row:?}");
    }
    assert!(report.checks.iter().all(|c| c.passed));
}

#[test]
fn noise_experiment_uses_matched_sizes() {
    let report = run_rmse_vs_noise(&small()).unwrap();
    let c = small();
    assert_eq!(report.row(SchemeKind::Sis, None, 0).unwrap().n, c.sis_n());
    assert_eq!(report.row(SchemeKind::Isir, None, 0).unwrap().n, c.isir_n());
    assert_eq!(report.row(SchemeKind::Sr, Some(c.sr_k()), 1).unwrap().n, 12);
    assert_eq!(report.not_budget_matched, vec![format!("nssr(N=12,k={})", c.nssr_k())]);
    // Two grid points, five schemes.
    assert_eq!(report.rows.len(), 10);
}

#[test]
fn reductions_match_dedicated_runs() {
    let config = ExperimentConfig {
        runs: 40,
        ..small()
    };
    let report = run_rmse_vs_k(&config).unwrap();
    let reductions: Vec<_> = report.checks.iter().filter(|c| c.name.starts_with("reduction")).collect();
    assert_eq!(reductions.len(), 4);
    assert!(reductions.iter().all(|c| c.passed), "{reductions:#?}");
}

#[test]
fn unshared_measurements_still_deterministic() {
    let config = ExperimentConfig {
        shared_measurements: false,
        ..small()
    };
    assert_eq!(run_rmse_vs_k(&config).unwrap(), run_rmse_vs_k(&config).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let ok = write_config(
        dir.path(),
        "n = 8\nk_list = [0, 4]\nruns = 3\nhorizon = 4\nschemes = [\"sr\", \"isir\"]\n",
    );
    let (code, stdout, _) = bench(&["rmse_vs_k", "--config", &ok, "--out", out, "--runs", "2", "--seed", "5"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("rmse_vs_k.csv"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/rmse_vs_k.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["runs"], 2);
    assert_eq!(json["config"]["seed"], 5);
    assert!(json["version"].as_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));

    let (code, _, stderr) = bench(&["rmse_vs_k", "--config", &ok, "--out", out, "--runs", "0"]);
    assert_eq!(code, 2, "{stderr}");
    let (code, _, _) = bench(&["no_such_experiment", "--config", &ok]);
    assert_eq!(code, 2);
    let (code, _, _) = bench(&["rmse_vs_k", "--config", "/nonexistent.toml"]);
    assert_eq!(code, 2);
    let (code, _, _) = bench(&["rmse_vs_k"]);
    assert_eq!(code, 2);

    let mismatched = write_config(dir.path(), "experiment = \"oracle_check\"\n");
    let (code, _, _) = bench(&["rmse_vs_k", "--config", &mismatched, "--out", out]);
    assert_eq!(code, 2);

    let too_big = write_config(dir.path(), "oracle_particles = [4]\n");
    let (code, _, _) = bench(&["oracle_check", "--config", &too_big, "--out", out]);
    assert_eq!(code, 2);

    let mutated = write_config(
        dir.path(),
        "oracle_particles = [2]\noracle_instances = 1\noracle_replicates = 20000\nmutate = true\n",
    );
    let (code, _, stderr) = bench(&["oracle_check", "--config", &mutated, "--out", out]);
    assert_eq!(code, 1);
    assert!(stderr.contains("FAIL fit"));
}

#[test]
fn committed_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let config = ExperimentConfig::load(&path).unwrap();
            let tag = config.experiment.expect("committed configs name their experiment");
            config.validate(tag).unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 6);
}
