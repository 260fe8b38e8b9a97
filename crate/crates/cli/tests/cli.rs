use std::path::PathBuf;
use std::process::{Command, Output};

use sharedcache::delivery::TransmissionPlan;
use sharedcache::indexcoding::BoundsReport;
use sharedcache::model::System;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sharedcache")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

#[test]
fn plan_example2_log_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plan.json");
    let cfg = config("example2.json");
    let o = run(&["plan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let log = stdout(&o);
    assert_eq!(log.lines().filter(|l| l.starts_with("  T_")).count(), 11);
    assert_eq!(log.lines().filter(|l| l.starts_with("round ")).count(), 3);
    assert!(log.contains("T_{1,4,6} = X^1_{2,3} ⊕ X^4_{1,3} ⊕ X^6_{1,2}"));

    let parsed = TransmissionPlan::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let text = std::fs::read_to_string(cfg).unwrap();
    let sys = sharedcache::model::SystemSpec::from_json(&text).unwrap().validate().unwrap();
    let direct = sharedcache::delivery::sc_delivery(&sys.config, &sys.association, sys.demands().unwrap()).unwrap();
    assert_eq!(parsed, direct);
}

#[test]
fn plan_improved_and_full_memory() {
    let o = run(&["plan", "--config", config("repeated.json").to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("  T_")).count(), 9);

    let o = run(&["plan", "--config", config("full-memory.json").to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("0 transmissions"));
}

#[test]
fn bounds_reports() {
    let o = run(&["bounds", "--config", config("example2.json").to_str().unwrap()]);
    assert!(o.status.success());
    let r: BoundsReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((r.alpha_lower, r.kappa_upper, r.bounds_meet), (11, 11, true));

    let o = run(&["bounds", "--config", config("uniform3-gap.json").to_str().unwrap(), "--skip-oracles"]);
    assert!(o.status.success());
    let r: BoundsReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((r.alpha_lower, r.kappa_upper, r.bounds_meet), (8, 9, false));
    assert_eq!(r.alpha_exact, None);

    let o = run(&["bounds", "--config", config("pair.json").to_str().unwrap()]);
    let r: BoundsReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((r.alpha_exact, r.kappa_exact), (Some(1), Some(1)));
}

#[test]
fn bounds_oracle_limit_without_skip() {
    let o = run(&[
        "bounds",
        "--config",
        config("uniform3-gap.json").to_str().unwrap(),
        "--kappa-limit",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "oracle_limit");
}

#[test]
fn simulate_contracts() {
    let cfg = config("example2.json");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--delta", "1", "--seed", "4"]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["patterns_tested"], 15);
    assert_eq!(r["coded_length"], 15);

    let again = run(&["simulate", "--config", cfg.to_str().unwrap(), "--delta", "1", "--seed", "4"]);
    assert_eq!(o.stdout, again.stdout);

    let o = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());

    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--delta", "1", "--code-delta", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr_json(&o);
    assert_eq!(err["error"], "decode");
    assert!(!err["failures"].as_array().unwrap().is_empty());
}

#[test]
fn rates_csv() {
    let o = run(&["rates", "--config", config("repeated.json").to_str().unwrap(), "--delta", "1"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.starts_with("gamma,rate_uncoded,rate_coded,scheme,delta"));
    assert!(csv.contains("0.5,11/6,15/6,sc-worst,1"));
    assert!(csv.contains("0.5,9/6,13/6,improved,1,2,9,13,13/6,7"));

    let o = run(&["rates", "--config", config("example2.json").to_str().unwrap(), "--delta", "0"]);
    for line in stdout(&o).lines().skip(1).filter(|l| !l.starts_with('#')) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1], cols[2], "{line}");
    }
}

#[test]
fn sweep_tiny() {
    let o = run(&["sweep", "--config", config("pair.json").to_str().unwrap()]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["demands"], 4);
    assert_eq!(r["max_transmissions"], 1);

    let o = run(&["sweep", "--config", config("example2.json").to_str().unwrap(), "--sweep-limit", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "sweep_limit");
}

#[test]
fn validation_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"num_files": 2, "num_users": 2, "num_caches": 3, "cache_memory": 1, "association": [[1], [2]], "demands": [1, 2]}"#,
    )
    .unwrap();
    let o = run(&["plan", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr_json(&o);
    assert_eq!(err["error"], "validation");
    assert!(err["field"].is_string());

    std::fs::write(
        &path,
        r#"{"num_files": 2, "num_users": 2, "num_caches": 2, "cache_memory": 1, "association": [[1], [2]], "demands": [1, 3]}"#,
    )
    .unwrap();
    let o = run(&["plan", "--config", path.to_str().unwrap()]);
    assert_eq!(stderr_json(&o)["field"], "demands");

    std::fs::write(
        &path,
        r#"{"num_files": 2, "num_users": 2, "num_caches": 2, "cache_memory": 1, "association": [[1], [2]], "colour": 1}"#,
    )
    .unwrap();
    let o = run(&["plan", "--config", path.to_str().unwrap()]);
    assert!(stderr_json(&o)["message"].as_str().unwrap().contains("colour"));
}

#[test]
fn system_json_round_trip_through_spec() {
    let text = std::fs::read_to_string(config("uniform3.json")).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value.as_object_mut().unwrap().remove("options");
    let sys: System = serde_json::from_value::<sharedcache::model::SystemSpec>(value).unwrap().validate().unwrap();
    assert_eq!(sys.association.profile(), vec![3, 3, 3]);
}
