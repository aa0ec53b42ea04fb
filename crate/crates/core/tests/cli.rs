use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn kslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kslab"))
        .args(args)
        .env("KSLAB_THREADS", "2")
        .output()
        .expect("spawn kslab")
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn params_reports_worked_selection() {
    let out = kslab(&["params", "-n", "2", "-a", "0.3", "-q", "1.2", "-r", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert!((v["selection"]["s"].as_f64().unwrap() - 12.0 / 11.0).abs() < 1e-12);
    assert!((v["selection"]["s1"].as_f64().unwrap() - 12.0 / 7.0).abs() < 1e-12);
    assert_eq!(v["r_interval"]["upper"], "inf");
    assert_eq!(v["alpha_clamped"], false);
    assert_eq!(v["predicted_decay_exponent"].as_f64(), Some(-0.5));
}

#[test]
fn params_rejects_alpha_below_threshold() {
    let out = kslab(&["params", "-n", "3", "-a", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("threshold 0.25"), "{}", stderr(&out));
}

#[test]
fn params_reports_clamped_alpha() {
    let out = kslab(&["params", "-n", "1", "-a", "0.8", "-q", "2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["alpha_clamped"], true);
    assert_eq!(v["alpha_eff"].as_f64(), Some(0.499));
}

#[test]
fn params_rejects_r_outside_range() {
    let out = kslab(&["params", "-n", "2", "-a", "0.3", "-q", "1.2", "-r", "1.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("r = 1.2"), "{}", stderr(&out));
}

#[test]
fn simulate_writes_snapshots_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = kslab(&["simulate", config("dirac_1d.cfg").to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csvs = fs::read_dir(&out_dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("u_"))
        .count();
    assert!(csvs >= 5, "{csvs} u snapshots");
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("run.json")).unwrap()).unwrap();
    assert_eq!(manifest["passed"], true);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["config"]["file"]["eps"], "1e-4");
    assert!(manifest["outputs"].as_array().unwrap().iter().any(|f| f == "manifest.json"));
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("two_atoms_1d.cfg");
    for k in 0..2 {
        let out_dir = dir.path().join(format!("r{k}"));
        let out = kslab(&["simulate", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for k in 0..5 {
        for name in [format!("u_{k:04}.csv"), format!("v_{k:04}.csv")] {
            let a = fs::read(dir.path().join("r0").join(&name)).unwrap();
            let b = fs::read(dir.path().join("r1").join(&name)).unwrap();
            assert!(a == b, "{name} differs between runs");
        }
    }
    let manifest = |k: usize| {
        let mut v: Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(format!("r{k}/manifest.json"))).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    assert_eq!(manifest(0), manifest(1));
    assert_eq!(manifest(0)["config"]["output_times"][2].as_f64(), Some(0.03));
}

#[test]
fn simulate_rejects_bad_eps_override() {
    let out = kslab(&["simulate", config("dirac_1d.cfg").to_str().unwrap(), "--set", "eps=1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--set: key `eps`: eps must lie in (0,1)"), "{}", stderr(&out));
}

#[test]
fn simulate_names_line_of_bad_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(&path, "grid.cells = 64\nmeasure.preset = dirac\nt_end = 0.01\neps = 1.5\n").unwrap();
    let out = kslab(&["simulate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 4: key `eps`"), "{}", stderr(&out));
}

#[test]
fn simulate_reports_missing_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nogrid.cfg");
    fs::write(&path, "measure.preset = dirac\nt_end = 0.01\neps = 1e-3\n").unwrap();
    let out = kslab(&["simulate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing required key `grid.cells`"), "{}", stderr(&out));
}

#[test]
fn experiment_writes_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = kslab(&["experiment", "smoothing", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary = stdout_json(&out);
    let e = summary["fit"]["exponent"].as_f64().unwrap();
    assert!((-0.30..=-0.20).contains(&e), "{e}");
    for f in ["smoothing.csv", "smoothing.json", "smoothing.svg", "run.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn experiment_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // A window wholly inside the mollification layer cannot show the smoothing rate.
    let out = kslab(&[
        "experiment",
        "smoothing",
        "--set",
        "experiment.t_min=1e-7",
        "--set",
        "experiment.t_max=2e-6",
        "--set",
        "experiment.slack=0.0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["passed"], false);
}

#[test]
fn unknown_experiment_and_suite_list_choices() {
    let out = kslab(&["experiment", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("weak-star"), "{}", stderr(&out));
    let out = kslab(&["verify", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("rates-2d"), "{}", stderr(&out));
}

#[test]
fn verify_exponents_suite() {
    let out = kslab(&["verify", "exponents"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["suite"], "exponents");
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
}
