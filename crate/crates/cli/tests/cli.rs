use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hskdv"))
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|_| panic!("missing {}", path.display()))
}

#[test]
fn same_seed_gives_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let status = bin()
            .args([
                "--mode",
                "simulate",
                "--a",
                "1/2",
                "--n-modes",
                "16",
                "--dt",
                "1e-3",
                "--t-final",
                "0.2",
                "--seed",
                "42",
                "--out-dir",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(
        read(&out_a.join("trajectory.jsonl")),
        read(&out_b.join("trajectory.jsonl"))
    );
    assert_eq!(
        read(&out_a.join("energies.csv")),
        read(&out_b.join("energies.csv"))
    );

    // Manifests agree except for the wall-time field.
    let mut ma: serde_json::Value =
        serde_json::from_str(&read(&out_a.join("manifest.json"))).unwrap();
    let mut mb: serde_json::Value =
        serde_json::from_str(&read(&out_b.join("manifest.json"))).unwrap();
    for m in [&mut ma, &mut mb] {
        m.as_object_mut().unwrap().remove("wall_time_s");
        m["config"].as_object_mut().unwrap().remove("out_dir");
    }
    assert_eq!(ma, mb);
}

#[test]
fn manifest_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let status = bin()
        .args([
            "--mode",
            "resonance-scan",
            "--a",
            "1/3",
            "--k-max",
            "50",
            "--out-dir",
        ])
        .arg(&first)
        .status()
        .unwrap();
    assert!(status.success());

    // Feed the config echoed in the manifest back in as a config file.
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&first.join("manifest.json"))).unwrap();
    let mut config = manifest["config"].clone();
    let second = dir.path().join("second");
    config["out_dir"] = serde_json::Value::String(second.to_string_lossy().into_owned());
    let config_path = dir.path().join("config.json");
    fs::write(&config_path, serde_json::to_string(&config).unwrap()).unwrap();

    let status = bin().arg("--config").arg(&config_path).status().unwrap();
    assert!(status.success());
    assert_eq!(
        read(&first.join("gap_r1.csv")),
        read(&second.join("gap_r1.csv"))
    );
    assert_eq!(
        read(&first.join("scan_summary.json")),
        read(&second.join("scan_summary.json"))
    );
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    fs::write(
        &config_path,
        r#"{"mode": "resonance-scan", "a": "1/3", "k_max": 30}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .arg("--config")
        .arg(&config_path)
        .args(["--a", "2/5", "--out-dir"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&read(&out.join("scan_summary.json"))).unwrap();
    assert_eq!(summary["a"], serde_json::json!(0.4));
}

#[test]
fn invalid_config_exits_2_and_names_the_field() {
    let out = bin()
        .args(["--mode", "simulate", "--a", "1.7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("'a'"),
        "stderr should name the field: {stderr}"
    );

    let out = bin()
        .args(["--mode", "simulate", "--n-modes", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("'n-modes'"), "stderr: {stderr}");

    let out = bin().args(["--mode", "dissipative"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("'gamma'"), "stderr: {stderr}");
}

#[test]
fn blow_up_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "--mode",
            "simulate",
            "--a",
            "1/2",
            "--n-modes",
            "16",
            "--dt",
            "1.9e-3",
            "--t-final",
            "5",
            "--amplitude",
            "2e4",
            "--s",
            "0.6",
            "--seed",
            "22",
            "--out-dir",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("blow-up at t ="), "stderr: {stderr}");
}

#[test]
fn oracle_test_mode_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--mode", "oracle-test", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"pass\": true"));
    assert!(dir.path().join("oracle_report.json").exists());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn rational_scan_zeros_on_multiples_of_three() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--mode",
            "resonance-scan",
            "--a",
            "1/3",
            "--k-max",
            "100",
            "--out-dir",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("scan_summary.json"))).unwrap();
    let zeros: Vec<i64> = summary["exact_zeros_r1"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_i64().unwrap())
        .collect();
    let expect: Vec<i64> = (1..=33).map(|m| 3 * m).collect();
    assert_eq!(zeros, expect);
}
