use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn flmc(args: &[&str], threads: usize) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flmc"))
        .args(args)
        .env("FLMC_THREADS", threads.to_string())
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
        .display()
        .to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Every output file except `timing.json`, by name.
fn outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timing.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

/// Writes `base` with `edit` applied to a scratch config.
fn edited(dir: &Path, base: &str, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(config(base)).unwrap()).unwrap();
    edit(&mut v);
    let path = dir.join(format!("edited-{base}"));
    fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    path
}

#[test]
fn sample_stable_edge_cases() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    let o = flmc(&["sample-stable", "--alpha", "1.5", "--n", "0", "--out", s(&empty)], 1);
    assert!(o.status.success());
    assert_eq!(fs::read(empty.join("draws.txt")).unwrap().len(), 0);

    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let o = flmc(&["sample-stable", "--alpha", "1.3", "--n", "1000", "--seed", "5", "--out", s(dir)], 2);
        assert!(o.status.success());
    }
    assert_eq!(outputs(&a), outputs(&b));
    let lines = fs::read_to_string(a.join("draws.txt")).unwrap();
    assert_eq!(lines.lines().count(), 1000);

    let o = flmc(&["sample-stable", "--alpha", "0.5", "--n", "10", "--out", s(&a)], 1);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sample_stable_reports_gaussian_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let o = flmc(&["sample-stable", "--alpha", "2", "--n", "1000000", "--seed", "1", "--out", s(tmp.path())], 1);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("gaussian fit") && err.contains(": pass"), "{err}");
    assert!(err.contains("characteristic function: pass"), "{err}");
}

#[test]
fn config_errors_map_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");

    let bad = tmp.path().join("bad.json");
    fs::write(&bad, "{\n  \"schema_version\": 1,\n  \"objective\": [\n").unwrap();
    let o = flmc(&["optimize", s(&bad), "--out", s(&out)], 1);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));

    let o = flmc(&["optimize", s(&tmp.path().join("missing.json")), "--out", s(&out)], 1);
    assert_eq!(o.status.code(), Some(3));

    // Every violation is listed.
    let cfg = edited(tmp.path(), "well_weak_error.json", |v| {
        v["study"]["etas"] = serde_json::json!([0.004, 0.002]);
        v["run"]["alpha"] = serde_json::json!(2.5);
        v["objective"]["name"] = serde_json::json!("rosenbrock");
    });
    let o = flmc(&["weak-error", s(&cfg), "--out", s(&out)], 1);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("at least 3") && err.contains("alpha") && err.contains("rosenbrock"), "{err}");

    // Study kind must match the command.
    let o = flmc(&["optimize", &config("well_verify.json"), "--out", s(&out)], 1);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn all_diverged_is_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = edited(tmp.path(), "double_well_optimize.json", |v| {
        v["run"]["eta"] = serde_json::json!(5.0);
        v["run"]["k"] = serde_json::json!(100);
        v["run"]["replicas"] = serde_json::json!(4);
    });
    let o = flmc(&["optimize", s(&cfg), "--out", s(&tmp.path().join("out"))], 1);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn zero_steps_write_initial_states() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = edited(tmp.path(), "double_well_optimize.json", |v| {
        v["run"]["k"] = serde_json::json!(0);
    });
    let out = tmp.path().join("out");
    let o = flmc(&["optimize", s(&cfg), "--out", s(&out)], 1);
    assert!(o.status.success());
    let traj = fs::read_to_string(out.join("trajectories.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1 + 64);
    assert!(traj.lines().skip(1).all(|l| l.split(',').nth(1) == Some("0")));
    assert_eq!(fs::read_to_string(out.join("suboptimality.csv")).unwrap().lines().count(), 2);
}

#[test]
fn plan_at_half_is_infeasible() {
    let tmp = tempfile::tempdir().unwrap();
    let o = flmc(&["plan", &config("plan_gamma_half.json"), "--out", s(tmp.path())], 1);
    assert!(o.status.success());
    let v = json(tmp.path().join("plan.json"));
    assert_eq!(v["feasible"], Value::Bool(false));

    let cfg = edited(tmp.path(), "plan_gamma_half.json", |v| {
        v["study"]["gamma"] = serde_json::json!(0.38);
    });
    let o = flmc(&["plan", s(&cfg), "--out", s(&tmp.path().join("ok"))], 1);
    assert!(o.status.success());
    let v = json(tmp.path().join("ok/plan.json"));
    assert_eq!(v["feasible"], Value::Bool(true));
    assert_eq!(v["violations"], serde_json::json!([]));
}

#[test]
fn fast_ergodicity_removes_the_third_term() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = edited(tmp.path(), "well_bounds.json", |v| {
        v["constants"]["lambda_star"] = serde_json::json!(1e6);
    });
    let o = flmc(&["bounds", s(&cfg), "--out", s(tmp.path())], 1);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(tmp.path().join("bounds.json"));
    assert!(v["breakdown"]["a3"].as_f64().unwrap() < 1e-300);
    assert_eq!(v["shape_only"], Value::Bool(true));
    let sweep = fs::read_to_string(tmp.path().join("bounds_sweep.csv")).unwrap();
    assert_eq!(sweep.lines().next(), Some("k,eta,a1,a2,a3,a4,total"));
    assert_eq!(sweep.lines().count(), 1 + 16);

    let cfg = edited(tmp.path(), "well_bounds.json", |v| {
        v["constants"]["not_a_constant"] = serde_json::json!(1.0);
    });
    assert_eq!(flmc(&["bounds", s(&cfg), "--out", s(tmp.path())], 1).status.code(), Some(1));
}

#[test]
fn verify_passes_on_the_well() {
    let tmp = tempfile::tempdir().unwrap();
    let o = flmc(&["verify", &config("well_verify.json"), "--out", s(tmp.path())], 1);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(tmp.path().join("verify.json"));
    assert_eq!(v["all_passed"], Value::Bool(true));
    assert_eq!(v["checks"].as_array().unwrap().len(), 9);
}

/// Pilot-run regression for the checked-in double-well scenario.
#[test]
fn double_well_scenario_regression() {
    let tmp = tempfile::tempdir().unwrap();
    let o = flmc(&["optimize", &config("double_well_optimize.json"), "--out", s(tmp.path())], 1);
    assert!(o.status.success());
    let v = json(tmp.path().join("summary.json"));
    assert_eq!(v["within_radius"].as_f64(), Some(41.0 / 64.0));
    assert_eq!(v["survived"].as_u64(), Some(63));
    let m = json(tmp.path().join("manifest.json"));
    assert_eq!(m["diverged"].as_array().unwrap().len(), 1);
    assert_eq!(m["derived"]["local_certificate"], Value::Bool(true));
    assert_eq!(m["replica_seeds"].as_array().unwrap().len(), 64);
}

#[test]
fn weak_error_scenario_decreases() {
    let tmp = tempfile::tempdir().unwrap();
    let o = flmc(&["weak-error", &config("well_weak_error.json"), "--out", s(tmp.path())], 1);
    assert!(o.status.success());
    let v = json(tmp.path().join("weak_error.json"));
    assert_eq!(v["decreasing_in_eta"], Value::Bool(true));
    assert!(v["fit"]["slope"].as_f64().unwrap() > 0.3);
    let csv = fs::read_to_string(tmp.path().join("weak_error.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("eta,wq,ci_lo,ci_hi"));
}

/// The manifest's config, run again, reproduces every output.
#[test]
fn manifest_config_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = edited(tmp.path(), "well_posterior.json", |v| {
        v["run"]["k"] = serde_json::json!(2000);
        v["run"]["replicas"] = serde_json::json!(50);
        v["study"]["grid"]["n"] = serde_json::json!(4097);
    });
    let first = tmp.path().join("first");
    assert!(flmc(&["sample-posterior", s(&cfg), "--out", s(&first), "--seed", "99"], 1).status.success());
    let echoed = json(first.join("manifest.json"))["config"].clone();
    assert_eq!(echoed["run"]["seed"].as_u64(), Some(99));
    let again_cfg = tmp.path().join("echoed.json");
    fs::write(&again_cfg, serde_json::to_string(&echoed).unwrap()).unwrap();
    let second = tmp.path().join("second");
    assert!(flmc(&["sample-posterior", s(&again_cfg), "--out", s(&second)], 3).status.success());
    assert_eq!(outputs(&first), outputs(&second));
    assert!(first.join("posterior.csv").exists());
}

#[test]
fn seed_flag_changes_results() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = edited(tmp.path(), "double_well_optimize.json", |v| {
        v["run"]["k"] = serde_json::json!(500);
    });
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(flmc(&["optimize", s(&cfg), "--out", s(&a), "--seed", "1"], 1).status.success());
    assert!(flmc(&["optimize", s(&cfg), "--out", s(&b), "--seed", "2"], 1).status.success());
    assert_ne!(
        fs::read(a.join("trajectories.csv")).unwrap(),
        fs::read(b.join("trajectories.csv")).unwrap()
    );
}
