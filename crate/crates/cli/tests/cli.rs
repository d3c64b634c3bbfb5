use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(out: &Path, statements: &str, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smaa-promethee"))
        .arg("--problem")
        .arg(fixture("students.json"))
        .arg("--statements")
        .arg(fixture(statements))
        .arg("--out")
        .arg(out)
        .args(["--samples", "4000", "--burn-in", "200", "--seed", "7"])
        .args(extra)
        .output()
        .expect("binary runs")
}

fn feasibility(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("feasibility.json")).unwrap()).unwrap()
}

#[test]
fn scenario_one_auto_selects_classical() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), "scenario1.jsonl", &[]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let f = feasibility(dir.path());
    assert_eq!(f["mode"], "classical");
    assert!(f["classical"]["epsilon_star"].as_f64().unwrap() > 0.0);
    for name in ["smaa_report.json", "smaa_report.txt", "smaa_report.csv"] {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }
    assert!(!dir.path().join("ror_report.json").exists());
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("smaa_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["parameter_names"].as_array().unwrap().len(), 3);
}

#[test]
fn scenario_two_is_incompatible_without_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), "scenario2.jsonl", &[]);
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("epsilon bipolar"), "{stderr}");
    assert!(stderr.contains("binding: statement"), "{stderr}");
    let f = feasibility(dir.path());
    assert!(f["mode"].is_null());
    assert!(!dir.path().join("smaa_report.json").exists());
}

#[test]
fn scenario_two_escalates_to_bipolar_with_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_smaa-promethee"))
        .arg("--problem")
        .arg(fixture("students_q1p3.json"))
        .arg("--statements")
        .arg(fixture("scenario2.jsonl"))
        .arg("--out")
        .arg(dir.path())
        .args(["--samples", "2000", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let f = feasibility(dir.path());
    assert_eq!(f["mode"], "bipolar");
    assert!((f["bipolar"]["epsilon_star"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-9);
}

#[test]
fn empty_statements_run_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "empty.jsonl",
        &["--mode", "bipolar", "--exact-ror", "--dump-samples"],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(feasibility(dir.path())["mode"], "bipolar");
    let ror: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ror_report.json")).unwrap())
            .unwrap();
    assert_eq!(ror["violations"], 0);
    let bytes = std::fs::metadata(dir.path().join("samples.bin"))
        .unwrap()
        .len();
    assert_eq!(bytes, 4000 * 12 * 8);
    assert!(dir.path().join("samples.bin.json").is_file());
}

#[test]
fn identical_seeds_give_identical_reports() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(a.path(), "scenario1.jsonl", &["--mode", "bipolar"]);
    let o = Command::new(env!("CARGO_BIN_EXE_smaa-promethee"))
        .env("SMAA_THREADS", "1")
        .arg("--problem")
        .arg(fixture("students.json"))
        .arg("--statements")
        .arg(fixture("scenario1.jsonl"))
        .arg("--out")
        .arg(b.path())
        .args([
            "--samples",
            "4000",
            "--burn-in",
            "200",
            "--seed",
            "7",
            "--mode",
            "bipolar",
        ])
        .output()
        .unwrap();
    assert!(o.status.success());
    for name in [
        "feasibility.json",
        "smaa_report.json",
        "smaa_report.txt",
        "smaa_report.csv",
    ] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(
        &bad,
        "{\"type\": \"local_pair\", \"a\": \"s1\", \"b\": \"nobody\", \"kind\": \"P\"}\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_smaa-promethee"))
        .arg("--problem")
        .arg(fixture("students.json"))
        .arg("--statements")
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nobody"));

    let o = Command::new(env!("CARGO_BIN_EXE_smaa-promethee"))
        .args(["--problem", "x.json", "--mode", "fancy"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));

    let garbled = dir.path().join("garbled.jsonl");
    std::fs::write(&garbled, "# ok\n\n{not json}\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_smaa-promethee"))
        .arg("--problem")
        .arg(fixture("students.json"))
        .arg("--statements")
        .arg(&garbled)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}
