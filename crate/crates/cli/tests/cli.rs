use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spectra-lab"));
    c.env_remove("SPECTRA_LAB_OUT");
    c
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    let line = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(line.lines().next().expect("stderr has a line")).expect("stderr is JSON")
}

#[test]
fn cuboid_spectrum_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["cuboid-spectrum", "--sides", "1,1", "--bc", "Z,Z", "--k", "5"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv, golden("cuboid_spectrum_zz_k5.csv"));
    let first: f64 = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let half_pi2 = std::f64::consts::PI.powi(2) / 2.0;
    assert!((first - half_pi2).abs() <= 4.0 * f64::EPSILON * half_pi2);
}

#[test]
fn unknown_flag_is_rejected_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&["cuboid-spectrum", "--sides", "1,1", "--k", "3", "--frobnicate"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["kind"], "usage");
    assert!(!out.exists());
}

#[test]
fn invalid_domain_exits_2_with_structured_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&["cuboid-spectrum", "--sides", "1,0", "--k", "3"], &out);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["kind"], "invalid_input");
    assert_eq!(e["error"]["exit_code"], 2);
    assert!(!out.exists());
}

#[test]
fn manifest_records_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["cuboid-spectrum", "--sides", "1,2,3", "--bc", "D,N,Z", "--k", "20", "--seed", "7"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 7);
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    let outputs = m["outputs"].as_array().unwrap();
    let mut names: Vec<&str> = outputs.iter().map(|e| e["path"].as_str().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["spectrum.csv", "spectrum.json"]);
    for e in outputs {
        let bytes = std::fs::read(dir.path().join(e["path"].as_str().unwrap())).unwrap();
        assert_eq!(e["bytes"].as_u64().unwrap() as usize, bytes.len());
        let hex = e["sha256"].as_str().unwrap();
        assert_eq!(hex.len(), 64);
    }
}

#[test]
fn reruns_reproduce_outputs_bit_for_bit() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["isoperimetric", "--lipschitz", "0.5,3", "--m", "32", "--jobs", "2"];
    assert_eq!(run(&args, a.path()).status.code(), Some(0));
    assert_eq!(run(&args, b.path()).status.code(), Some(0));
    let read = |d: &Path| -> Value { serde_json::from_str(&std::fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap() };
    let (ma, mb) = (read(a.path()), read(b.path()));
    assert_eq!(ma["config_hash"], mb["config_hash"]);
    assert_eq!(ma["outputs"], mb["outputs"]);
}

#[test]
fn n2_certificate_reports_computed_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["n2-certificate", "--from", "6318", "--to", "6326"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("n2.json")).unwrap()).unwrap();
    let k = v["threshold"].as_u64().unwrap();
    assert!((6000..=6500).contains(&k));
    assert_eq!(v["printed_threshold"], 6222);
    assert_eq!(v["differs_from_printed"], true);
    assert!(v["discrepancy_note"].as_str().unwrap().contains("6222"));
    let csv = std::fs::read_to_string(dir.path().join("n2_scan.csv")).unwrap();
    assert_eq!(csv, golden("n2_scan_6318_6326.csv"));
}

#[test]
fn config_file_supplies_flags_and_explicit_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"sides": [1, 1], "bc": "Z", "k": 9}"#).unwrap();
    let out = dir.path().join("run");
    let o = run(&["cuboid-spectrum", "--config", cfg.to_str().unwrap(), "--k", "5"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert_eq!(csv, golden("cuboid_spectrum_zz_k5.csv"));
}

#[test]
fn env_var_overrides_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let env_out = dir.path().join("env");
    let flag_out = dir.path().join("flag");
    let o = bin()
        .args(["n2-certificate", "--out"])
        .arg(&flag_out)
        .env("SPECTRA_LAB_OUT", &env_out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(env_out.join("manifest.json").exists());
    assert!(!flag_out.exists());
}

#[test]
fn reproduce_degenerate_cuboids_passes_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reproduce", "4.2", "--jobs", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.contains(",PASS,")));
}

#[test]
fn reproduce_rejects_unknown_section() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reproduce", "9.9"], &dir.path().join("x"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fem_solve_square_dirichlet() {
    let dir = tempfile::tempdir().unwrap();
    let domain = dir.path().join("square.json");
    std::fs::write(&domain, r#"{"kind": "polygon", "vertices": [[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
    let out = dir.path().join("run");
    let o = run(&["fem-solve", "--domain", domain.to_str().unwrap(), "--bc", "dirichlet", "--k", "3", "--h", "0.05"], &out);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let l1: f64 = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let exact = 2.0 * std::f64::consts::PI.powi(2);
    assert!((l1 / exact - 1.0).abs() < 0.01, "{l1}");
    assert!(out.join("domain.svg").exists());
}

#[test]
fn weyl_plot_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["weyl", "--family", "degenerate-cuboids", "--d", "2", "--ks", "100,1000,10000"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("weyl.csv")).unwrap();
    assert!(csv.starts_with("bc,k,eigenvalue,volume,weyl,ratio,source\n"));
    assert_eq!(csv.lines().count(), 7);
    let svg = std::fs::read_to_string(dir.path().join("ratio.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn optimize_cuboid_writes_json_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["optimize", "--class", "cuboid", "--signature", "0,0,2", "--k", "100", "--constraint", "volume"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    let sides: Vec<f64> = v["shape"]["sides"].as_array().unwrap().iter().map(|s| s.as_f64().unwrap()).collect();
    let a = sides[0].min(sides[1]);
    assert!(a < 0.2476, "{a}");
    assert!(dir.path().join("result.svg").exists());
}
