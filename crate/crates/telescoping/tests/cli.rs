//! End-to-end runs of the telescope binary: artifact shapes, determinism,
//! exit codes and the documented usage errors.

use std::path::Path;
use std::process::{Command, Output};

fn telescope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_telescope"))
        .args(args)
        .env_remove("TELESCOPE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip_while(|l| l.starts_with('#'))
        .skip(1) // header row
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn pmf_zeta2_starts_at_one_half() {
    let out = telescope(&["pmf", "--law", "zeta2", "--n", "3"]);
    assert!(out.status.success());
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][0], "1");
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.5);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.5);
}

#[test]
fn pmf_tgeometric_2_starts_at_one_quarter() {
    let out = telescope(&["pmf", "--law", "tgeometric", "--theta", "2"]);
    assert!(out.status.success());
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows[0][0], "1");
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.25);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.25);
}

#[test]
fn pmf_mass_accumulates_to_the_final_cdf() {
    let out = telescope(&["pmf", "--law", "tpoisson", "--theta", "0.7"]);
    assert!(out.status.success());
    let rows = data_rows(&stdout(&out));
    let total: f64 = rows.iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    let last_cdf: f64 = rows.last().unwrap()[2].parse().unwrap();
    assert!(
        (total - last_cdf).abs() < 1e-9,
        "sum {total} vs cdf {last_cdf}"
    );
    assert!(last_cdf > 1.0 - 2e-9, "table reaches the 1-1e-9 quantile");
}

#[test]
fn pmf_requires_matching_theta() {
    let out = telescope(&["pmf", "--law", "zeta2", "--theta", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = telescope(&["pmf", "--law", "tpoisson"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pmf_zeta2_without_truncation_is_refused() {
    // The 1-1e-9 quantile of zeta2 sits near 10^9 support points.
    let out = telescope(&["pmf", "--law", "zeta2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("--n"), "tells the user the way out: {err}");
}

#[test]
fn sample_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = telescope(&[
            "sample",
            "--law",
            "tpoisson",
            "--theta",
            "0.5",
            "--size",
            "500",
            "--seed",
            "42",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn sample_embeds_its_replay_line() {
    let out = telescope(&[
        "sample",
        "--law",
        "tgeometric",
        "--theta",
        "3",
        "--size",
        "5",
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with(
        "# replay: telescope sample --law tgeometric --theta 3 --size 5 --seed 0x7 --format csv"
    ));
    assert_eq!(data_rows(&text).len(), 5);
}

#[test]
fn sample_rejects_empty_requests() {
    let out = telescope(&["sample", "--law", "zeta2", "--size", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_json_round_trips_through_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("batch.json");
    let out = telescope(&[
        "sample",
        "--law",
        "tgeometric",
        "--theta",
        "2",
        "--size",
        "100000",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = telescope(&[
        "estimate",
        path.to_str().unwrap(),
        "--law",
        "tgeometric",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let theta_hat = doc["theta_hat"].as_f64().unwrap();
    assert!((theta_hat - 2.0).abs() < 0.05, "theta_hat = {theta_hat}");
    assert_eq!(doc["method"], "mom");
    assert_eq!(doc["size"], 100000);
}

fn write_sample(dir: &Path, name: &str, values: &[u64]) -> String {
    let path = dir.join(name);
    let mut text = String::from("value\n");
    for v in values {
        text.push_str(&format!("{v}\n"));
    }
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn estimate_tgeometric_mean_three_gives_theta_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_sample(dir.path(), "mean3.csv", &[1, 5, 3, 3]);
    let out = telescope(&["estimate", &path, "--law", "tgeometric"]);
    assert!(out.status.success());
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows[0][4].parse::<f64>().unwrap(), 2.0);
    assert_eq!(rows[0][5], "false");
}

#[test]
fn estimate_tpoisson_clamps_large_means() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_sample(dir.path(), "mean4.csv", &[4, 4, 4]);
    let out = telescope(&["estimate", &path, "--law", "tpoisson"]);
    assert!(out.status.success());
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows[0][4].parse::<f64>().unwrap(), 1.0);
    assert_eq!(rows[0][5], "true");
}

#[test]
fn estimate_surfaces_degenerate_samples() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_sample(dir.path(), "ones.csv", &[1, 1, 1]);
    let out = telescope(&["estimate", &path, "--law", "tgeometric"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("degenerate"), "{err}");
}

#[test]
fn nptest_rejects_under_the_alternative() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alt.csv");
    let out = telescope(&[
        "sample",
        "--law",
        "tgeometric",
        "--theta",
        "4",
        "--size",
        "500",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = telescope(&[
        "nptest",
        path.to_str().unwrap(),
        "--theta0",
        "2",
        "--theta1",
        "4",
        "--calibration",
        "clt",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["reject"], true);
}

#[test]
fn nptest_validates_hypothesis_order_and_level() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_sample(dir.path(), "s.csv", &[2, 3, 4]);
    let out = telescope(&["nptest", &path, "--theta0", "4", "--theta1", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = telescope(&[
        "nptest", &path, "--theta0", "2", "--theta1", "4", "--alpha", "1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_unicyclic_reports_the_s4_counts() {
    let out = telescope(&["verify", "--check", "unicyclic", "--n", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for expected in [
        "count with statistic 1,12,12,true",
        "count with statistic 2,4,4,true",
        "count with statistic 3,2,2,true",
        "count with statistic 4,6,6,true",
    ] {
        assert!(text.contains(expected), "missing {expected} in:\n{text}");
    }
}

#[test]
fn verify_respects_cap_overrides() {
    let out = telescope(&["verify", "--check", "unicyclic", "--n", "9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = telescope(&["verify", "--check", "unicyclic", "--n", "5", "--cap", "5"]);
    assert!(out.status.success());
}

#[test]
fn table1_json_lists_rows_doubles_and_excluded() {
    let out = telescope(&["table1", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["total_row_entries"], 24);
    let third_row: Vec<&str> = doc["rows"][2]["permutations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(third_row, vec!["2314", "3124"]);
    assert_eq!(doc["rows"][2]["rho"], "1/12");
    assert_eq!(doc["multiplicity"]["2341"], 2);
    assert_eq!(doc["excluded"].as_array().unwrap().len(), 5);
}

#[test]
fn ascent_compare_hits_both_targets() {
    let out = telescope(&["ascent-compare", "--size", "20000", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let e_minus_1 = std::f64::consts::E - 1.0;
    assert!((rows[0]["target_mean"].as_f64().unwrap() - e_minus_1).abs() < 1e-12);
    assert_eq!(rows[1]["target_mean"].as_f64().unwrap(), 3.0);
    for row in rows {
        assert!(row["abs_error"].as_f64().unwrap() < 0.05);
    }
}

#[test]
fn ascent_compare_is_reproducible() {
    let a = telescope(&["ascent-compare", "--size", "5000", "--seed", "11"]);
    let b = telescope(&["ascent-compare", "--size", "5000", "--seed", "11"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert!(a.status.success());
}

#[test]
fn out_dir_env_var_provides_auto_named_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_telescope"))
        .args(["sample", "--law", "zeta2", "--size", "10", "--seed", "3"])
        .env("TELESCOPE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("wrote "), "{text}");
    let written = dir.path().join("sample-zeta2-n10-seed3.csv");
    assert!(written.exists(), "expected {}", written.display());
}
