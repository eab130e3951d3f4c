//! End-to-end behaviour of the `madcap` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn madcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_madcap")).args(args).output().expect("binary runs")
}

fn spec(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn analyze_json(body: &str) -> serde_json::Value {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "c.json", body);
    let out = madcap(&["analyze", p.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn malformed_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("bad.json", "{ not json"),
        ("row.json", r#"{"dim":2,"decays":[{"from":1,"to":0,"p":1.5}]}"#),
        ("upward.json", r#"{"dim":3,"decays":[{"from":0,"to":1,"p":0.2}]}"#),
        ("unknown.json", r#"{"dim":2,"decays":[],"extra":1}"#),
    ];
    for (name, body) in cases {
        let p = write(dir.path(), name, body);
        let out = madcap(&["analyze", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let sweep =
        write(dir.path(), "sweep.json", r#"{"dim":2,"template":[],"slots":[{"name":"g","min":0,"max":1,"step":0}]}"#);
    assert_eq!(madcap(&["sweep", sweep.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(madcap(&["analyze", "/nonexistent/channel.json"]).status.code(), Some(2));
    assert_eq!(madcap(&["mad3", "--gamma10", "0.7"]).status.code(), Some(2));
    assert_eq!(madcap(&["mad3", "--gamma10", "0.2", "--k-values", "2.5"]).status.code(), Some(2));
    assert_eq!(madcap(&["selftest", "--tol-psd", "-1"]).status.code(), Some(2));
    assert_eq!(madcap(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn analyze_reports_certificates() {
    let id = analyze_json(r#"{"dim":4,"decays":[]}"#);
    assert_eq!(id["kind"], "ExactDegradable");
    assert!((id["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);

    let adc = analyze_json(r#"{"dim":2,"decays":[{"from":1,"to":0,"p":0.6}]}"#);
    assert_eq!(adc["kind"], "Zero");
    assert_eq!(adc["antidegradable"], true);
    assert_eq!(adc["degradable"], "0");

    let example = analyze_json(
        r#"{"dim":4,"decays":[{"from":1,"to":0,"p":0.7},{"from":3,"to":2,"p":0.35},{"from":3,"to":0,"p":0.35}]}"#,
    );
    assert!((example["value"].as_f64().unwrap() - 1.0).abs() <= 1e-6, "{example}");
    assert_ne!(example["kind"], "LowerBound");
}

#[test]
fn adc_sweep_flips_at_one_half() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("adc.csv");
    let out = madcap(&["sweep", &spec("adc.json"), "--quiet", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["g", "degradable", "antidegradable", "min_eig", "cert_kind", "cert_value"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 21);
    for r in &rows {
        let g: f64 = r[0].parse().unwrap();
        assert_eq!(&r[2] == "1", g >= 0.5, "γ = {g}");
        if g < 0.5 {
            assert_eq!(&r[1], "1");
        } else if g > 0.5 && g < 1.0 {
            assert_eq!(&r[1], "0");
        }
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| madcap(&["sweep", &spec("adc.json"), "--quiet", "--threads", threads]).stdout;
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("3"));
}

#[test]
fn failed_sweep_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "s.json", r#"{"dim":2,"template":[{"from":1,"to":0,"expr":"g"}],"slots":[]}"#);
    let target = dir.path().join("out.csv");
    let out = madcap(&["sweep", bad.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(std::fs::read_dir(dir.path()).unwrap().all(|e| {
        let name = e.unwrap().file_name();
        name != "out.csv" && !name.to_string_lossy().ends_with(".partial")
    }));
}

#[test]
fn mad3_scan_matches_closed_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let scan = dir.path().join("scan.csv");
    let slice = dir.path().join("slice.csv");
    let out = madcap(&[
        "mad3",
        "--gamma10",
        "0",
        "--iterations",
        "2",
        "--k-values",
        "1,1.5",
        "--slice-step",
        "0.1",
        "--slice-out",
        slice.to_str().unwrap(),
        "--out",
        scan.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["values_match"], true);
    let mut rdr = csv::Reader::from_path(&scan).unwrap();
    let mut rows = 0;
    for r in rdr.records() {
        let r = r.unwrap();
        let (n, k): (i32, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let predicted: f64 = r[3].parse().unwrap();
        assert!((predicted - (1.0 - k / 2f64.powi(n + 1))).abs() < 1e-12);
        assert_eq!(&r[6], "1");
        rows += 1;
    }
    assert_eq!(rows, 6);
    assert!(csv::Reader::from_path(&slice).unwrap().records().count() > 0);
}

#[test]
fn selftest_passes() {
    let out = madcap(&["selftest", "--seed", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}
