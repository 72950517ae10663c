use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use graph_energy::io::{read_edge_list, read_manifest, read_summary_csv};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_graph-energy"));
    c.env_remove("GRAPH_ENERGY_THREADS");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("graph-energy-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn ok(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn generate_without_cross_edges() {
    let dir = scratch("gen4");
    let out = run(&["generate", "--n", "4", "--k", "1", "--kab", "0", "--seed", "7", "--out", "g.txt"], &dir);
    assert!(out.status.success());
    let list = read_edge_list(std::fs::read(dir.join("g.txt")).unwrap().as_slice()).unwrap();
    assert!(list.edges.iter().all(|&(i, j)| (i < 2) == (j < 2)));
    assert_eq!(list.header["n"], "4");
    let m = read_manifest(std::fs::File::open(dir.join("g.txt.manifest.json")).unwrap()).unwrap();
    assert_eq!(m.command, "generate");
    assert_eq!(m.parameters["seed"], 7);
}

#[test]
fn odd_n_is_a_validation_error() {
    let out = run(&["generate", "--n", "1001", "--k", "5", "--kab", "1"], &scratch("odd"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n must be even"));
}

#[test]
fn generate_is_deterministic() {
    let dir = scratch("det");
    for name in ["a.txt", "b.txt"] {
        let args = ["generate", "--n", "200", "--k", "8", "--kab", "3", "--seed", "99", "--out", name];
        assert!(run(&args, &dir).status.success());
    }
    assert_eq!(std::fs::read(dir.join("a.txt")).unwrap(), std::fs::read(dir.join("b.txt")).unwrap());
}

#[test]
fn triangle_energy() {
    let dir = scratch("tri");
    std::fs::write(dir.join("t.txt"), "0 1\n1 2\n2 0\n").unwrap();
    let report = ok(&run(&["spectrum", "--input", "t.txt"], &dir));
    assert!((report["energy"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    let csv = std::fs::read_to_string(dir.join("spectrum.spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("index,eigenvalue"));
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.join("spectrum.histogram.csv").exists());
    assert!(dir.join("spectrum.manifest.json").exists());
}

#[test]
fn empty_edge_lists() {
    let dir = scratch("empty");
    std::fs::write(dir.join("e.txt"), "").unwrap();
    let out = run(&["spectrum", "--input", "e.txt"], &dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no edges / empty graph"));

    let out = run(&["spectrum", "--input", "e.txt", "--n", "6"], &dir);
    let report = ok(&out);
    assert_eq!(report["energy"].as_f64(), Some(0.0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no edges / empty graph"));
}

#[test]
fn missing_input_is_an_io_error() {
    let out = run(&["spectrum", "--input", "does-not-exist.txt"], &scratch("io"));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn bad_edge_list_is_a_validation_error() {
    let dir = scratch("bad");
    std::fs::write(dir.join("b.txt"), "0 1\n1 1\n").unwrap();
    assert_eq!(run(&["spectrum", "--input", "b.txt"], &dir).status.code(), Some(2));
    std::fs::write(dir.join("c.txt"), "0 one\n").unwrap();
    assert_eq!(run(&["spectrum", "--input", "c.txt"], &dir).status.code(), Some(2));
}

#[test]
fn planted_spectrum_has_two_clear_outliers() {
    let dir = scratch("outliers");
    let report = ok(&run(&["spectrum", "--n", "1000", "--k", "50", "--kab", "25", "--seed", "1"], &dir));
    let edge = report["bulk_edge_pred"].as_f64().unwrap();
    assert!(report["outlier_count"].as_u64().unwrap() >= 2);
    assert!(report["lambda1"].as_f64().unwrap() > 1.1 * edge);
    assert!(report["lambda2"].as_f64().unwrap() > 1.1 * edge);
    assert!(report["lambda_min"].as_f64().unwrap().abs() < 1.1 * edge);
}

#[test]
fn theory_examples() {
    let dir = scratch("theory");
    let t = ok(&run(&["theory", "--k", "50", "--q", "2"], &dir));
    assert!((t["threshold"].as_f64().unwrap() - 14.1421).abs() < 1e-4);

    let t = ok(&run(&["theory", "--n", "1000", "--k", "50", "--kab", "25"], &dir));
    assert!((t["lambda2_pred"].as_f64().unwrap() - 27.0).abs() < 1e-12);
    assert_eq!(t["detectable"], true);

    let t = ok(&run(&["theory", "--n", "1000", "--k", "50", "--kab", "50"], &dir));
    assert_eq!(t["delta_e_pred"].as_f64(), Some(0.0));
    assert_eq!(t["delta_e_raw"].as_f64(), Some(0.0));

    let out = run(&["theory", "--n", "1000", "--k", "50", "--kab", "25", "--q", "3"], &dir);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["theory", "--k", "50", "--format", "text"], &dir);
    assert!(String::from_utf8_lossy(&out.stdout).contains("threshold  14.1421356237"));
}

#[test]
fn config_file_supplies_flags_and_flags_win() {
    let dir = scratch("config");
    std::fs::write(dir.join("c.json"), r#"{"n": 1000, "k": 50, "k_ab": 10}"#).unwrap();
    let t = ok(&run(&["--config", "c.json", "theory", "--kab", "25"], &dir));
    assert_eq!(t["k_ab"].as_f64(), Some(25.0));
    assert_eq!(t["n"].as_u64(), Some(1000));

    std::fs::write(dir.join("bad.json"), r#"{"n": 1000, "kk": 50}"#).unwrap();
    assert_eq!(run(&["--config", "bad.json", "theory"], &dir).status.code(), Some(2));
}

#[test]
fn sweep_zero_reps_is_rejected() {
    let out = run(&["sweep", "--n", "40", "--k", "4", "--reps", "0"], &scratch("reps0"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_outputs_are_thread_independent_and_replayable() {
    let dir = scratch("sweep");
    let common = ["sweep", "--n", "60", "--k", "6", "--kab-grid", "0:6:1.5", "--reps", "15", "--seed", "5"];
    let mut first = common.to_vec();
    first.extend(["--threads", "1", "--out", "t1"]);
    ok(&run(&first, &dir));
    let out = bin()
        .args(common)
        .args(["--out", "t4"])
        .env("GRAPH_ENERGY_THREADS", "4")
        .current_dir(&dir)
        .output()
        .unwrap();
    ok(&out);
    let m4 = read_manifest(std::fs::File::open(dir.join("t4.manifest.json")).unwrap()).unwrap();
    assert_eq!(m4.threads, 4);

    // a config file outranks the environment default
    std::fs::write(dir.join("c.json"), r#"{"threads": 2}"#).unwrap();
    let out = bin()
        .args(["--config", "c.json"])
        .args(common)
        .args(["--out", "t2"])
        .env("GRAPH_ENERGY_THREADS", "4")
        .current_dir(&dir)
        .output()
        .unwrap();
    ok(&out);
    let m2 = read_manifest(std::fs::File::open(dir.join("t2.manifest.json")).unwrap()).unwrap();
    assert_eq!(m2.threads, 2);

    let replay = ["sweep", "--replay", "t1.manifest.json", "--threads", "3", "--out", "r"];
    ok(&run(&replay, &dir));

    let a = std::fs::read(dir.join("t1.summary.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.join("t4.summary.csv")).unwrap());
    assert_eq!(a, std::fs::read(dir.join("t2.summary.csv")).unwrap());
    assert_eq!(a, std::fs::read(dir.join("r.summary.csv")).unwrap());

    let rows = read_summary_csv(a.as_slice()).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.count == 15));
    let plot = std::fs::read_to_string(dir.join("t1.plot.dat")).unwrap();
    assert_eq!(plot.lines().filter(|l| !l.starts_with('#')).count(), 5);
}

#[test]
fn small_energy_sweep_shape() {
    // ΔE ≈ 0 below 2√20 ≈ 8.94 and falling above it
    let dir = scratch("shape");
    let args = ["sweep", "--n", "200", "--k", "20", "--kab-grid", "20:0:-4", "--reps", "150", "--seed", "3", "--mode", "energy"];
    ok(&run(&args, &dir));
    let rows = read_summary_csv(std::fs::read(dir.join("sweep.summary.csv")).unwrap().as_slice()).unwrap();
    let threshold = 2.0 * 20f64.sqrt();
    let mut previous = f64::INFINITY;
    for r in &rows {
        let (d, se) = (r.mean_delta_e.unwrap(), r.stderr_delta_e.unwrap());
        assert!(r.mean_lambda2.is_none());
        if r.k_aa_minus_k_ab <= threshold {
            assert!(d.abs() < 3.0 * se, "x = {}: {d} ± {se}", r.k_aa_minus_k_ab);
        } else if r.k_aa_minus_k_ab > threshold + 8.0 {
            assert!(d < previous && d < -3.0 * se, "x = {}: {d}", r.k_aa_minus_k_ab);
        }
        previous = d;
    }
}
