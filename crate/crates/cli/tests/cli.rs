use std::process::Command;

fn autocull() -> Command {
    Command::new(env!("CARGO_BIN_EXE_autocull"))
}

#[test]
fn synth_writes_one_csv_per_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let status = autocull()
        .args(["synth", "--seed", "3", "--pairs", "1", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["counts-a.csv", "linear-a.csv", "threshold-a.csv", "xor-a.csv"]);
}

#[test]
fn missing_config_fails_with_a_message() {
    let out = autocull().args(["run", "--config", "/nonexistent/config.toml"]).output().unwrap();
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
}

#[test]
fn landmark_prints_a_json_audit() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("out");
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/example.toml");
    let boot = autocull()
        .args(["bootstrap", "--config", cfg, "--budget", "2", "--out"])
        .arg(&base)
        .status()
        .unwrap();
    assert!(boot.success());
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/xor-a.csv");
    let out = autocull()
        .args(["landmark", "--config", cfg, "--dataset", data, "-k", "2", "--out"])
        .arg(&base)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["dataset"], "xor-a");
    let landmark_time = json["landmark_time_s"].as_f64().unwrap();
    assert!(landmark_time > 0.0);
    let remaining = json["budget_remaining_s"].as_f64().unwrap();
    assert!((landmark_time + remaining - json["budget_total_s"].as_f64().unwrap()).abs() < 1e-9);
}
