use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qot(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qot"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .unwrap()
}

fn lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

#[test]
fn simulate_writes_one_row_per_trial() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "simulate", "--protocol", "qot", "--n", "16", "--N", "6", "--r", "3", "--m", "2", "--noise", "0.02",
        "--trials", "1000", "--seed", "7",
    ];
    let out = qot(&args, tmp.path());
    assert!(out.status.success());
    assert_eq!(csv_rows(&tmp.path().join("summary.csv")).len(), 1000);
    assert_eq!(lines(&tmp.path().join("transcripts.jsonl")).len(), 1000);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("pass rate") && stdout.contains("decode success"));

    let again = tempfile::tempdir().unwrap();
    assert!(qot(&args, again.path()).status.success());
    for f in ["summary.csv", "transcripts.jsonl", "summary.json", "config.json"] {
        assert_eq!(
            std::fs::read(tmp.path().join(f)).unwrap(),
            std::fs::read(again.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn qkd_never_announces_a_second_set() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qot(
        &["simulate", "--protocol", "qkd", "--n", "40", "--N", "4", "--m", "2", "--trials", "200", "--seed", "2"],
        tmp.path(),
    );
    assert!(out.status.success());
    let ts = lines(&tmp.path().join("transcripts.jsonl"));
    assert!(ts.iter().any(|t| t["abort"].is_null()));
    for t in &ts {
        assert!(t["announced"].as_array().unwrap().len() <= 1);
        assert!(t["sets"].is_null() || t["sets"]["e1"].is_null());
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"n": 10, "N": 2, "m": 1, "trials": 5, "seed": 3, "mode": "exact_quantum",
            "strategy": {"kind": "store_subset", "store": {"count": 2}, "avoid_in_sets": false}}"#,
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let out = qot(&["simulate", "--config", cfg.to_str().unwrap(), "--trials", "7"], &out_dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let eff: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("config.json")).unwrap()).unwrap();
    assert_eq!(eff["trials"], 7);
    assert_eq!(eff["params"]["n"], 10);
    assert_eq!(eff["strategy"]["kind"], "store_subset");
    assert_eq!(csv_rows(&out_dir.join("summary.csv")).len(), 7);
}

#[test]
fn usage_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(qot(&["simulate", "--bogus"], tmp.path()).status.code(), Some(1));
    assert_eq!(qot(&["simulate", "--n", "8"], tmp.path()).status.code(), Some(1));
    // r + m > N
    assert_eq!(qot(&["simulate", "--n", "20", "--N", "2", "--m", "3"], tmp.path()).status.code(), Some(1));
    assert_eq!(
        qot(&["attack", "--n", "8", "--m", "1", "--strategy", "store"], tmp.path()).status.code(),
        Some(1)
    );
}

#[test]
fn resource_caps_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        qot(&["simulate", "--n", "40", "--m", "1", "--mode", "exact"], tmp.path()).status.code(),
        Some(2)
    );
    assert_eq!(qot(&["density-check", "--code", "yao", "--N", "14"], tmp.path()).status.code(), Some(2));
    let over = tmp.path().join("over");
    let out = qot(&["attack", "--n", "8", "--N", "2", "--m", "1", "--budget", "10"], &over);
    assert_eq!(out.status.code(), Some(2));
    let partial: Value = serde_json::from_str(&std::fs::read_to_string(over.join("info_report.json")).unwrap()).unwrap();
    assert_eq!(partial["valid"], false);
}

#[test]
fn yao_certificate_within_hypothesis_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qot(&["density-check", "--code", "yao", "--N", "6", "--t", "2"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let recs = lines(&tmp.path().join("certificates.jsonl"));
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["dN"], 6);
    assert_eq!(recs[0]["condition_met"], true);
    assert!(recs[0]["max_defect"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn out_of_hypothesis_radius_is_reported_not_failed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qot(&["density-check", "--code", "yao", "--N", "6", "--t", "3"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let recs = lines(&tmp.path().join("certificates.jsonl"));
    assert_eq!(recs[0]["condition_met"], false);
    assert!(recs[0]["max_defect"].as_f64().unwrap() > 1e-3);
}

#[test]
fn random_code_sweep_certifies() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qot(
        &[
            "density-check", "--code", "random", "--N", "8", "--rows", "3", "--codes", "50", "--t", "0,1,2,3",
            "--seed", "11",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let recs = lines(&tmp.path().join("certificates.jsonl"));
    let inside: Vec<_> = recs.iter().filter(|r| r["condition_met"] == true).collect();
    assert!(inside.len() > 100);
    assert!(inside.iter().all(|r| r["max_defect"].as_f64().unwrap() <= 1e-10));
}

#[test]
fn honest_information_is_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qot(&["attack", "--n", "8", "--N", "2", "--m", "1", "--code", "yao", "--delta", "0.125"], tmp.path());
    assert!(out.status.success());
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("info_report.json")).unwrap()).unwrap();
    assert!(rep["mutual_information"].as_f64().unwrap().abs() <= 1e-9);
    assert_eq!(rep["valid"], true);
    assert_eq!(csv_rows(&tmp.path().join("defect.csv")).len(), 1);
}

#[test]
fn store_sweep_table_follows_one_in_eight() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qot(
        &["attack", "--analysis", "store-sweep", "--n", "128", "--m", "1", "--trials", "4000", "--fractions", "0.25,0.5"],
        tmp.path(),
    );
    assert!(out.status.success());
    let rows = csv_rows(&tmp.path().join("store_stats.csv"));
    assert_eq!(rows.len(), 2);
    for (row, f) in rows.iter().zip([0.25, 0.5]) {
        let expected: f64 = row[4].parse().unwrap();
        assert_eq!(expected, 128.0 * f / 8.0);
        let z: f64 = row[7].parse().unwrap();
        assert!(z < 4.0);
    }
}

#[test]
fn random_ok_emits_branch_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qot(
        &["attack", "--n", "8", "--N", "2", "--m", "1", "--delta", "0.125", "--strategy", "random-ok", "--trials", "3000"],
        tmp.path(),
    );
    assert!(out.status.success());
    let rows = csv_rows(&tmp.path().join("random_ok.csv"));
    assert_eq!(rows.len(), 1);
    let pr: f64 = rows[0][1].parse().unwrap();
    let mixture: f64 = rows[0][4].parse().unwrap();
    let se: f64 = rows[0][5].parse().unwrap();
    assert!((pr - mixture).abs() < 4.0 * se);
}

#[test]
fn defect_table_in_exact_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qot(
        &[
            "attack", "--analysis", "defect", "--n", "8", "--N", "2", "--m", "1", "--delta", "0.25", "--mode", "exact",
            "--trials", "30", "--strategy", "fixed-basis", "--angle", "0.3",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&tmp.path().join("defect_runs.csv"));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| (0.0..=1.0 + 1e-12).contains(&r[3].parse::<f64>().unwrap())));
}

#[test]
fn code_stats_aggregates() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qot(&["code-stats", "--N", "16", "--rows", "0", "--trials", "20"], tmp.path());
    assert!(out.status.success());
    let rows = csv_rows(&tmp.path().join("code_stats.csv"));
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| &r[3] == "true"));

    let args = ["code-stats", "--N", "16", "--rows", "8", "--eta", "0.1", "--trials", "200", "--seed", "5"];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(qot(&args, a.path()).status.success());
    assert!(qot(&args, b.path()).status.success());
    let agg: Value = serde_json::from_str(&std::fs::read_to_string(a.path().join("code_stats.json")).unwrap()).unwrap();
    assert!(agg["fraction"].as_f64().unwrap() >= 0.9);
    assert_eq!(
        std::fs::read(a.path().join("code_stats.csv")).unwrap(),
        std::fs::read(b.path().join("code_stats.csv")).unwrap()
    );
}
