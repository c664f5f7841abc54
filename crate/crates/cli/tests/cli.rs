use std::path::Path;
use std::process::{Command, Output};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bench")).args(args).output().expect("run bench")
}

fn bench_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(args)
        .env(key, value)
        .output()
        .expect("run bench")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

fn write_tiny(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(format!("{name}.csv")), body).unwrap();
    std::fs::write(dir.join(format!("{name}.spec")), "n_inputs=1\ntask=fitting\nhas_header=true\n").unwrap();
}

#[test]
fn run_writes_table_and_predictions() {
    let data = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let body: String = std::iter::once("x,y\n".to_string())
        .chain((0..30).map(|i| format!("{},{}\n", i as f64 / 10.0, (i as f64 / 10.0).sin())))
        .collect();
    write_tiny(data.path(), "wave", &body);
    let o = bench_env(
        &["run", "--data", p(data.path()), "--out", p(out.path()), "--sigma", "0.1", "--bp-epochs", "20", "--seed", "3"],
        "BENCH_THREADS",
        "2",
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(out.path().join("results.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "dataset,grnn_mse,grnn_time_s,bp_mse,bp_time_s,sigma,seed");
    assert!(lines[1].starts_with("wave,"));
    assert!(lines[1].ends_with(",1.000e-1,3"));
    let preds = out.path().join("wave_predictions.csv");
    assert_eq!(header(&preds), "row,target_1,grnn_1,bp_1");
    assert_eq!(std::fs::read_to_string(preds).unwrap().lines().count(), 31);
}

#[test]
fn failed_dataset_sets_exit_code() {
    let data = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    write_tiny(data.path(), "good", "x,y\n0,0\n1,1\n2,4\n3,9\n");
    write_tiny(data.path(), "bad", "x,y\n0,0\n1,oops\n");
    let o = bench(&["run", "--data", p(data.path()), "--out", p(out.path()), "--bp-epochs", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let table = std::fs::read_to_string(out.path().join("results.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.lines().any(|l| l.starts_with("bad,") && l.contains("NA")));
    assert!(table.lines().any(|l| l.starts_with("good,") && !l.contains("NA")));
}

#[test]
fn empty_directory_warns_and_succeeds() {
    let data = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let o = bench(&["run", "--data", p(data.path()), "--out", p(out.path())]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn bad_sigma_is_rejected() {
    let data = tempfile::tempdir().unwrap();
    let o = bench(&["run", "--data", p(data.path()), "--out", p(data.path()), "--sigma", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sysid_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/linear.csv");
    let o = bench(&["sysid", "--plant", "linear", "--train-steps", "800", "--test-steps", "50", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(header(&out), "k,u,y,y_hat");
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 50);
}

#[test]
fn control_writes_one_trace_per_episode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("step.csv");
    let o = bench(&["control", "--scenario", "step", "--duration", "2", "--episodes", "2", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for ep in ["step_ep1.csv", "step_ep2.csv"] {
        let path = dir.path().join(ep);
        assert_eq!(header(&path), "k,t,r,z,u,n_patterns");
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 101);
    }
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 2);
}

#[test]
fn datasets_then_run_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let o = bench(&["datasets", "--out", p(&data)]);
    assert!(o.status.success());
    for name in ["simplefit", "abalone", "building_energy", "cholesterol", "engine", "breast_cancer", "iris", "thyroid"] {
        assert!(data.join(format!("{name}.csv")).exists(), "{name}");
        assert!(data.join(format!("{name}.spec")).exists(), "{name}");
    }
    let iris = std::fs::read_to_string(data.join("iris.csv")).unwrap();
    assert_eq!(iris.lines().count(), 151);
}
