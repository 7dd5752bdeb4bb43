//! End-to-end checks of the command-line surface: exit codes, file
//! shapes, manifests, and the documented flag contracts.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coboson"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_lines(out: &Output) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| l.to_string())
        .collect()
}

#[test]
fn approx_prints_both_z_forms() {
    let out = run(&["approx", "--gamma", "1", "--g", "2"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(
        lines[0],
        "gamma,g,x0,mu,z_curvature_form,z_width_form,strong_interaction_valid"
    );
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cells[2], "2.0000000000000000e0"); // x0 = 8^{1/3}
    assert!(cells[4].starts_with("7.1796769724")); // (1−√3)²/(1+√3)²
    assert!(cells[5].starts_with("1.8623989297"));
    assert_eq!(cells[6], "true");
}

#[test]
fn exclusive_parameter_sources() {
    let out = run(&["spectrum", "--zx", "0.5", "--gamma", "1", "--g", "2"]);
    assert_eq!(out.status.code(), Some(2), "clap conflict exits 2");
    let out = run(&["spectrum"]);
    assert_eq!(out.status.code(), Some(2), "missing source exits 2");
}

#[test]
fn invalid_domain_exits_2() {
    let out = run(&["spectrum", "--zx", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["entropy", "--zx", "0.4", "--alphas", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn capacity_exits_4() {
    let out = run(&["spectrum", "--zx", "0.99999", "--tail-tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn spectrum_with_manifest_sidecar() {
    let dir = tmp("spectrum_manifest");
    let csv = dir.join("modes.csv");
    let out = run(&[
        "spectrum",
        "--zx",
        "0.5",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("rank,label,lambda,log_lambda\n"));
    assert_eq!(body.lines().count(), 41); // header + J = 40 at tail 1e-12
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("modes.csv.meta.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["tool"], "coboson");
    assert_eq!(manifest["command"], "spectrum");
    assert_eq!(manifest["parameters"]["retained_modes"], 40);
    assert_eq!(manifest["tolerances"]["tail_tol"], 1e-12);
    assert!(manifest["tail_bounds"]["tail"].as_f64().unwrap() > 0.0);
    assert_eq!(manifest["outputs"][0], "modes.csv");
}

#[test]
fn chi_methods_agree_through_the_cli() {
    let mut values = Vec::new();
    for method in ["dp", "newton", "partition"] {
        let out = run(&[
            "chi", "--zx", "0.6", "--pairs", "6", "--method", method,
        ]);
        assert!(out.status.success(), "{method}");
        let lines = stdout_lines(&out);
        let chi6: f64 = lines[7].split(',').nth(1).unwrap().parse().unwrap();
        values.push(chi6);
    }
    assert!(((values[0] - values[1]) / values[1]).abs() < 1e-8);
    assert!(((values[1] - values[2]) / values[2]).abs() < 1e-12);
}

#[test]
fn bose_needs_dp() {
    let out = run(&["chi", "--zx", "0.5", "--pairs", "3", "--kind", "bose", "--method", "newton"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_round_trip_via_planted() {
    let out = run(&["fit", "--model", "fd", "--planted", "7,0.8,40"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    let cells: Vec<&str> = lines[1].split(',').collect();
    let j_mu: f64 = cells[1].parse().unwrap();
    let t_eff: f64 = cells[2].parse().unwrap();
    assert!((j_mu - 7.0).abs() < 1e-6);
    assert!((t_eff - 0.8).abs() < 1e-6);
    assert_eq!(cells[5], "true");
}

#[test]
fn dos_fit_reads_back_through_fit_command() {
    let dir = tmp("dos_roundtrip");
    let csv = dir.join("dos.csv");
    let out = run(&[
        "dos",
        "--zx",
        "0.6",
        "--pairs",
        "10",
        "--fit",
        "fd",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(dir.join("dos_fit.csv").exists());

    // feed the dos table back through the standalone fit command
    let out = run(&[
        "fit",
        "--model",
        "fd",
        "--input",
        csv.to_str().unwrap(),
        "--where",
        "zx=0.6",
    ]);
    assert!(out.status.success());
    let fit_direct = fs::read_to_string(dir.join("dos_fit.csv")).unwrap();
    let direct_jmu: f64 = fit_direct
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    let standalone_jmu: f64 = stdout_lines(&out)[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!(
        (direct_jmu - standalone_jmu).abs() < 1e-9,
        "{direct_jmu} vs {standalone_jmu}"
    );
}

#[test]
fn counting_sweep_shape() {
    let out = run(&[
        "counting",
        "--pairs",
        "10",
        "--zx-sweep",
        "0.2:0.8:4",
    ]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "zx,mean,variance");
    assert_eq!(lines.len(), 5);
    // Pauli suppression: variance grows with z
    let variances: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(variances.windows(2).all(|w| w[0] < w[1]), "{variances:?}");
}

#[test]
fn populations_sweep_long_format() {
    let out = run(&[
        "populations",
        "--pairs",
        "5",
        "--zx-sweep",
        "0.1,0.5",
        "--modes",
        "0,4,10",
    ]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "zx,mode,population");
    assert_eq!(lines.len(), 1 + 2 * 3);
}

#[test]
fn json_format_is_available() {
    let out = run(&["entropy", "--zx", "0.5", "--format", "json"]);
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert!(parsed.is_array());
    assert_eq!(parsed[0]["axis"], "x");
}

#[test]
fn oracle_convention_report_shows_the_gap() {
    let out = run(&["oracle", "convention", "--zx", "0.5", "--zy", "0.6"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    // N = 2 row: factorization gap is large, operator gap is ~0
    let cells: Vec<&str> = lines[2].split(',').collect();
    let factorization_gap: f64 = cells[3].parse().unwrap();
    let operator_gap: f64 = cells[5].parse().unwrap();
    assert!(factorization_gap > 1e-3);
    assert!(operator_gap < 1e-10);
}

#[test]
fn oracle_counting_matches_production() {
    let brute = run(&[
        "oracle", "counting", "--z", "0.5", "--modes", "14", "--pairs", "5", "--t", "5",
    ]);
    assert!(brute.status.success());
    let lines = stdout_lines(&brute);
    assert_eq!(lines[0], "n,prob");
    let total: f64 = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn density_emits_profiles_and_summary() {
    let dir = tmp("density_out");
    let stem = dir.join("run.csv");
    let out = run(&[
        "density",
        "--gamma",
        "1",
        "--g",
        "0.0106,20.7",
        "--pairs",
        "2",
        "--skip-validation",
        "--output",
        stem.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary = fs::read_to_string(dir.join("run_summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].contains("friedel"));
    assert!(rows[2].contains("wigner"));
    assert!(dir.join("run_g0.csv").exists());
    assert!(dir.join("run_g1.csv").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("run.meta.json")).unwrap()).unwrap();
    assert_eq!(manifest["parameters"]["pairs"], 2);
}
