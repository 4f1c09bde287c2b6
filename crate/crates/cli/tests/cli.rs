use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sparse-eb"));
    cmd.env_remove("SPARSE_EB_THREADS");
    cmd
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn simulate_output_round_trips_into_select() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate", "--n", "200", "--p", "10", "--A", "6", "--sigma", "1", "--seed", "5", "--out", "x.csv"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("x.csv")).unwrap();
    assert_eq!(text.lines().count(), 200);
    assert!(!text.contains('\r'));
    let parsed = sparse_eb::io::parse_vector(&text).unwrap();
    let direct = sparse_eb::simulate(&sparse_eb::Signal::spikes(200, 10, 6.0).unwrap(), 1.0, &Default::default(), 5).unwrap();
    assert_eq!(parsed, direct.x());

    let sel = json(&run(dir.path(), &["select", "--x", "x.csv", "--sigma", "1"]));
    let chosen: Vec<u64> = serde_json::from_value(sel["selected"].clone()).unwrap();
    // 1-based indices of the trailing spikes.
    assert!(chosen.iter().filter(|&&i| i > 190).count() >= 9);
    assert!(chosen.iter().all(|&i| (1..=200).contains(&i)));
}

#[test]
fn oracle_happy_path() {
    let dir = tempfile::tempdir().unwrap();
    let theta: String = (0..500).map(|i| if i >= 475 { "5\n" } else { "0\n" }).collect();
    fs::write(dir.path().join("theta.csv"), theta).unwrap();
    let report = json(&run(dir.path(), &["oracle", "--theta", "theta.csv", "--sigma", "1", "--tau", "1"]));
    assert_eq!(report["oracle_cardinality"], 25);
    assert!((report["rate_sq"].as_f64().unwrap() - 99.893_306_8).abs() < 1e-6);
    assert_eq!(report["oracle_set"][0], 476);
    assert_eq!(report["ebr_ratio"], 0.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.csv"), "1\n2\n").unwrap();
    fs::write(dir.path().join("bad.csv"), "1\nabc\n").unwrap();

    let out = run(dir.path(), &["select", "--x", "x.csv", "--sigma", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma"));

    assert_eq!(run(dir.path(), &["select", "--x", "bad.csv", "--sigma", "1"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["select", "--x", "missing.csv", "--sigma", "1"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["select", "--sigma", "1", "--frobnicate"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["nonsense"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
    // Randomized commands need a seed.
    assert_eq!(run(dir.path(), &["sample", "--x", "x.csv", "--sigma", "1"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["table1", "--out-dir", "t"]).status.code(), Some(2));
    // A value that squares to infinity is a numeric failure.
    fs::write(dir.path().join("huge.csv"), "1e200\n0\n").unwrap();
    assert_eq!(run(dir.path(), &["sample", "--x", "huge.csv", "--sigma", "1e-200", "--seed", "1"]).status.code(), Some(3));
}

#[test]
fn every_run_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.csv"), "0.5\n3.0\n-4.0\n").unwrap();
    let out = run(dir.path(), &["sample", "--x", "x.csv", "--sigma", "1", "--count", "20", "--seed", "9", "--out", "draws.json"]);
    assert!(out.status.success());
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("draws.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "sample");
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);

    let again = run(dir.path(), &["replay", "--manifest", "draws.json.manifest.json", "--out", "again.json"]);
    assert!(again.status.success());
    assert_eq!(fs::read(dir.path().join("draws.json")).unwrap(), fs::read(dir.path().join("again.json")).unwrap());

    // Without --out the manifest goes to stderr as one JSON line.
    let out = run(dir.path(), &["select", "--x", "x.csv", "--sigma", "1"]);
    let line = String::from_utf8(out.stderr).unwrap();
    let manifest: Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(manifest["subcommand"], "select");
}

#[test]
fn table1_config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"n": 100, "sigma": 1, "kappa": 0.7, "replications": 5,
        "grid": [{"p": 5, "A": 5, "M": 1}, {"p": 10, "A": 3, "M": 1.5}], "seed": 1}"#;
    fs::write(dir.path().join("config.json"), config).unwrap();
    let out = run(dir.path(), &["table1", "--config", "config.json", "--replications", "8", "--out-dir", "t"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t/table1.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    let csv = fs::read_to_string(dir.path().join("t/table1.csv")).unwrap();
    assert!(csv.starts_with("p,A,M,ratio,coverage"));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["resolved"]["replications"], 8);

    let calibrated = run(dir.path(), &["table1", "--config", "config.json", "--calibrate-M", "0.9", "--out-dir", "c"]);
    assert!(calibrated.status.success());
    let rows: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("c/table1.json")).unwrap()).unwrap();
    for row in rows.as_array().unwrap() {
        assert!(row["coverage"].as_f64().unwrap() >= 0.8);
    }

    let unknown = r#"{"n": 100, "sigma": 1, "kappa": 0.7, "replications": 5, "grid": [], "seed": 1, "extra": 1}"#;
    fs::write(dir.path().join("unknown.json"), unknown).unwrap();
    assert_eq!(run(dir.path(), &["table1", "--config", "unknown.json", "--out-dir", "u"]).status.code(), Some(2));
}

#[test]
fn simulation_subcommands_produce_curves() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--n", "100", "--p", "5", "--A", "6", "--sigma", "1", "--kappa", "2", "--seed", "3", "--replications", "4"];
    let mut args = vec!["contraction"];
    args.extend(common);
    args.extend(["--M-grid", "0,10,20", "--draws", "200", "--dat", "curve.dat"]);
    let value = json(&run(dir.path(), &args));
    assert_eq!(value["curve"].as_array().unwrap().len(), 3);
    let dat = fs::read_to_string(dir.path().join("curve.dat")).unwrap();
    assert_eq!(dat.lines().count(), 4);

    let mut args = vec!["dimcheck"];
    args.extend(common);
    args.extend(["--M-grid", "1,2", "--draws", "100"]);
    let value = json(&run(dir.path(), &args));
    assert_eq!(value["exact"].as_array().unwrap().len(), 2);
    assert_eq!(value["sampled"].as_array().unwrap().len(), 2);

    let mut args = vec!["selq"];
    args.extend(common);
    args.extend(["--noise", "rademacher"]);
    let value = json(&run(dir.path(), &args));
    assert_eq!(value["runs"].as_array().unwrap().len(), 4);

    let mut args = vec!["selq"];
    args.extend(common);
    args.extend(["--noise", "student-t-stress"]);
    assert_eq!(run(dir.path(), &args).status.code(), Some(2));
}

#[test]
fn estimate_ball_and_constants() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.csv"), "0.2\n-0.5\n6.0\n0.1\n4.5\n").unwrap();
    for method in ["threshold", "shrinkage"] {
        let value = json(&run(dir.path(), &["estimate", "--x", "x.csv", "--sigma", "1", "--method", method]));
        assert_eq!(value["estimate"].as_array().unwrap().len(), 5);
    }
    let value = json(&run(dir.path(), &["estimate", "--x", "x.csv", "--sigma", "1", "--method", "product", "--K", "100"]));
    assert_eq!(value["median"].as_array().unwrap().len(), 5);
    assert_eq!(run(dir.path(), &["estimate", "--x", "x.csv", "--sigma", "1", "--method", "product"]).status.code(), Some(2));

    let value = json(&run(dir.path(), &["ball", "--x", "x.csv", "--sigma", "1", "--M", "4", "--theta", "x.csv"]));
    assert_eq!(value["covers"], true);

    let value = json(&run(dir.path(), &["constants", "--beta", "1", "--B", "1", "--kappa", "4"]));
    assert_eq!(value["constants"]["kappa_bar"], 3.75);
    assert_eq!(value["constants"]["normal_case"]["c3"], 17.0);
    assert_eq!(run(dir.path(), &["constants", "--beta", "2", "--B", "1"]).status.code(), Some(2));

    let value = json(&run(dir.path(), &["ebr", "--theta", "x.csv", "--sigma", "1", "--t", "0.5"]));
    assert!(value["member"].is_boolean());
}
