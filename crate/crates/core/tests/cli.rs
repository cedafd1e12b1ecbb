use std::path::Path;
use std::process::{Command, Output};

fn mcslab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcslab"))
        .args(args)
        .current_dir(dir)
        .env_remove("MCSLAB_THREADS")
        .output()
        .unwrap()
}

#[test]
fn bounds_prints_measurement_count() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), "{}").unwrap();
    let out = mcslab(&["bounds", "--config", "c.json", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "5308");
    let manifest = std::fs::read_to_string(dir.path().join("o/manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(v["config"]["rho"], 0.01);
    assert_eq!(v["artifacts"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn unknown_key_is_a_line_anchored_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\n  \"m\": 3,\n  \"zzz\": 1\n}\n").unwrap();
    let out = mcslab(&["embed-demo", "--config", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json:3:"));
}

#[test]
fn out_of_range_value_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), "{\"epsilon\": 0.5}").unwrap();
    let out = mcslab(&["bounds", "--config", "c.json", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn increasing_distortion_fails_assertion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"sweep_m": [128, 8], "trials": 3, "samples": 400, "secants": 500}"#;
    std::fs::write(dir.path().join("c.json"), cfg).unwrap();
    let out = mcslab(&["embedding-sweep", "--config", "c.json", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn embed_demo_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), "{}").unwrap();
    for (t, out) in [("1", "a"), ("3", "b")] {
        let o = mcslab(&["embed-demo", "--config", "c.json", "--out", out, "--threads", t], dir.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |d: &str, f: &str| std::fs::read(dir.path().join(d).join(f)).unwrap();
    assert_eq!(read("a", "embedding3d.csv"), read("b", "embedding3d.csv"));
    let manifest = |d: &str| {
        let mut v: serde_json::Value = serde_json::from_slice(&read(d, "manifest.json")).unwrap();
        v["config"].as_object_mut().unwrap().remove("out");
        v
    };
    assert_eq!(manifest("a"), manifest("b"));
}
