use std::path::Path;
use std::process::{Command, Output};

fn loewner(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loewner"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("run loewner")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn rotation_semigroup_passes_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let o = loewner(dir.path(), &["--family", "rotation", "--n", "64", "verify", "P5.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS P5.1"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn tightened_tolerance_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = loewner(
        dir.path(),
        &["--n", "64", "--tol", "capacity=1e-300", "--tol", "joukowski=1e-300", "verify", "capacity"],
    );
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(loewner(dir.path(), &["--n", "100", "build-map"]).status.code(), Some(2));
    assert_eq!(loewner(dir.path(), &["--tol", "nonsense=1", "dump-config"]).status.code(), Some(2));
    assert_eq!(loewner(dir.path(), &["verify", "T9.9"]).status.code(), Some(2));
}

#[test]
fn measure_artifacts_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = loewner(dir.path(), &["--n", "128", "measure"]);
        assert_eq!(o.status.code(), Some(0));
    }
    for name in ["measure.csv", "measure.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name} differs between runs");
    }
    let csv = std::fs::read_to_string(a.path().join("measure.csv")).unwrap();
    assert!(csv.starts_with("# {"), "missing parameter header");
    assert!(csv.contains("\"seed\":20240917"));
}

#[test]
fn build_map_round_trips_through_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = loewner(dir.path(), &["--n", "64", "--a", "0.1,-0.2", "build-map"]);
    assert_eq!(o.status.code(), Some(0));
    let map = std::fs::read_to_string(dir.path().join("map.json")).unwrap();
    let g = loewner_core::serial::from_json(&map).unwrap();
    assert_eq!(g.grid().n, 64);
    assert!(g.circle_residual() < 1e-12);

    let cfg_path = dir.path().join("cfg.json");
    let dump = loewner(dir.path(), &["--n", "64", "--seed", "7", "dump-config"]);
    std::fs::write(&cfg_path, &dump.stdout).unwrap();
    let again = loewner(dir.path(), &["--config", cfg_path.to_str().unwrap(), "dump-config"]);
    assert_eq!(dump.stdout, again.stdout);
}

#[test]
fn flow_writes_one_line_per_state() {
    let dir = tempfile::tempdir().unwrap();
    let o = loewner(
        dir.path(),
        &["--n", "64", "flow", "--t-end", "0.02", "--dt", "0.01", "--scheme", "euler"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("flow.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l["seed"] == 20240917));
}
