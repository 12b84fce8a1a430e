use std::path::Path;
use std::process::{Command, Output};

fn tefs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tefs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn synth(dir: &Path, graph: &str, extra: &[&str]) -> String {
    let out = dir.to_str().unwrap();
    let mut args = vec!["synth", "--graph", graph, "--n", "300", "--seed", "0", "--out", out];
    args.extend_from_slice(extra);
    let o = tefs(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    dir.join("data.csv").to_str().unwrap().to_owned()
}

#[test]
fn synth_writes_data_and_truth() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "graph3", &[]);
    let text = std::fs::read_to_string(&data).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("X0,X1,Y"));
    assert_eq!(lines.count(), 300);
    let truth: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("truth.json")).unwrap()).unwrap();
    assert_eq!(truth["truth"]["true_target_links"], serde_json::json!([1, "Y"]));

    // same seed, same bytes
    let again = tempfile::tempdir().unwrap();
    let data2 = synth(again.path(), "graph3", &[]);
    assert_eq!(text, std::fs::read_to_string(data2).unwrap());
}

#[test]
fn synth_with_triples_has_100_feature_columns() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "graph10", &["--triples", "30"]);
    let header = std::fs::read_to_string(data).unwrap().lines().next().unwrap().to_owned();
    // 99 features plus the target column
    assert_eq!(header.split(',').count(), 100);
}

#[test]
fn synth_from_spec_file_and_unwritable_out() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"n_features": 1, "edges": [{"source": 0, "dest": "Y", "lag": 1, "coef": 0.9}],
            "noise_std": 0.5, "length": 50, "seed": 3}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = tefs(&["synth", "--graph", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let bad = blocker.join("sub");
    let o = tefs(&["synth", "--graph", "graph3", "--out", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn select_forward_reaches_estimate_floor() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "graph3", &[]);
    let o = tefs(&[
        "select", "--data", &data, "--target", "Y", "--direction", "forward", "--L", "2", "--M", "2",
        "--threshold", "100", "--B", "1", "--estimator", "gaussian-bic",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["stop_reason"], "EstimateFloor");
    assert_eq!(v["result"]["selected"], serde_json::json!([1]));
    assert_eq!(v["config"]["selection"]["lags"]["L"], 2);
    for key in ["selected", "removed", "steps", "iterations_K", "stop_reason", "threshold_used"] {
        assert!(v["result"].get(key).is_some(), "{key}");
    }
}

#[test]
fn select_forward_with_ksg_stops_on_the_floor() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "graph3", &[]);
    let o = tefs(&[
        "select", "--data", &data, "--target", "Y", "--direction", "forward", "--L", "2", "--M", "2",
        "--threshold", "100", "--estimator", "ksg",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["stop_reason"], "EstimateFloor");
}

#[test]
fn select_with_ksg_runs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "graph3", &[]);
    let args = [
        "select", "--data", &data, "--target", "Y", "--direction", "backward", "--L", "2", "--M", "2",
        "--threshold", "1e-6", "--estimator", "ksg", "--seed", "4",
    ];
    let a = tefs(&args);
    let b = tefs(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn select_merges_config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "graph3", &[]);
    let cfg = dir.path().join("sel.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"data": "{data}", "target": "Y", "direction": "backward", "L": 2, "M": 2,
                "threshold": 1e-6, "estimator": {{"backend": "gaussian-bic"}}}}"#
        ),
    )
    .unwrap();
    let o = tefs(&["select", "--config", cfg.to_str().unwrap(), "--direction", "forward", "--threshold", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["direction"], "forward");
    assert_eq!(v["config"]["selection"]["threshold"], 100.0);
    assert_eq!(v["config"]["selection"]["estimator"]["backend"], "gaussian-bic");
}

#[test]
fn select_usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "graph3", &[]);
    let base = ["select", "--data", &data, "--direction", "forward", "--L", "2", "--M", "2", "--threshold", "1"];
    assert_eq!(tefs(&base).status.code(), Some(2));
    let mut zero_lag = base.to_vec();
    zero_lag.extend(["--target", "Y"]);
    zero_lag[5] = "0";
    assert_eq!(tefs(&zero_lag).status.code(), Some(2));
    let mut bad_est = base.to_vec();
    bad_est.extend(["--target", "Y", "--estimator", "nope"]);
    assert_eq!(tefs(&bad_est).status.code(), Some(2));
    let mut missing_col = base.to_vec();
    missing_col.extend(["--target", "Z"]);
    assert_eq!(tefs(&missing_col).status.code(), Some(2));
}

#[test]
fn estimate_prints_six_decimals() {
    let dir = tempfile::tempdir().unwrap();
    // X1 is replaced by a column unrelated to Y
    let data = synth(dir.path(), "graph3", &[]);
    let text = std::fs::read_to_string(&data).unwrap();
    let mut out = String::from("X0,X1,N,Y\n");
    for (i, line) in text.lines().skip(1).enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let noise = ((i * 7919) % 1000) as f64 / 1000.0;
        out.push_str(&format!("{},{},{noise},{}\n", f[0], f[1], f[2]));
    }
    let path = dir.path().join("n.csv");
    std::fs::write(&path, out).unwrap();
    let p = path.to_str().unwrap();

    let args = ["estimate", "--data", p, "--target", "Y", "--source", "N", "--cond", "X1", "--L", "1", "--M", "1", "--seed", "2"];
    let a = tefs(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let s = stdout(&a);
    let v: f64 = s.trim().parse().unwrap();
    assert_eq!(s.trim().split('.').nth(1).unwrap().len(), 6);
    assert!(v.abs() <= 0.05, "{v}");
    assert_eq!(tefs(&args).stdout, a.stdout);

    let strong = tefs(&["estimate", "--data", p, "--target", "Y", "--source", "X1", "--L", "1", "--M", "1"]);
    let s: f64 = stdout(&strong).trim().parse().unwrap();
    assert!(s > 0.1, "{s}");

    let overlap = tefs(&["estimate", "--data", p, "--target", "Y", "--source", "X1", "--cond", "X1", "--L", "1", "--M", "1"]);
    assert_eq!(overlap.status.code(), Some(2));
}

#[test]
fn bench_writes_reports_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("b.json");
    std::fs::write(&cfg, r#"{"graph": "graph3", "sweep": {"axis": "noise"}, "seeds": [0, 1, 2]}"#).unwrap();
    let out = dir.path().join("out");
    let o = tefs(&["bench", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 6);
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);

    std::fs::write(&cfg, r#"{"graph": "graph3", "seeds": []}"#).unwrap();
    let o = tefs(&["bench", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&cfg, r#"{"graph": "graph3", "sede": 1}"#).unwrap();
    let o = tefs(&["bench", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "misspelled keys are schema errors");
}
