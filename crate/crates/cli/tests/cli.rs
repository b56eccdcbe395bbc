//! End-to-end behavior of the `mih` binary: exit codes, output documents
//! and skip handling.

use std::process::{Command, Output};

use mih_cli::formats::LawDocument;

fn mih(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mih"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn pmf_enumerates_three_rows_summing_to_one() {
    let out = mih(&[
        "pmf",
        "mih",
        "-N",
        "4",
        "-n",
        "1",
        "-p",
        "1/2",
        "--enumerate",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let doc = LawDocument::from_csv(&stdout(&out)).unwrap();
    assert_eq!(doc.entries.len(), 3);
    let total: f64 = doc.entries.iter().map(|e| e.logp.exp()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!((doc.entries[0].logp.exp() - 0.5).abs() < 1e-12);
}

#[test]
fn pmf_nm_zero_count_is_ln_q() {
    let out = mih(&["pmf", "nm", "-n", "1", "-p", "1/2", "-k", "0"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let logp = v["logp"].as_f64().unwrap();
    assert!((logp - 0.5f64.ln()).abs() < 1e-14);
}

#[test]
fn pmf_lattice_violation_exits_two() {
    let out = mih(&["pmf", "mih", "-N", "5", "-n", "1", "-p", "1/2", "-k", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("lattice"), "stderr: {err}");
}

#[test]
fn pmf_decimal_weight_rejected_for_finite_population() {
    let out = mih(&["pmf", "mih", "-N", "10", "-n", "1", "-p", "0.5", "-k", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let ok = mih(&["pmf", "nm", "-n", "1", "-p", "0.5", "-k", "0"]);
    assert!(ok.status.success());
}

#[test]
fn pmf_out_of_support_reports_zero_mass() {
    let out = mih(&["pmf", "mih", "-N", "4", "-n", "1", "-p", "1/2", "-k", "3"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["mass"].as_f64().unwrap(), 0.0);
    assert!(!v["in_support"].as_bool().unwrap());
    assert!(v.get("logp").is_none());
}

#[test]
fn law_json_output_round_trips_through_parser() {
    let out = mih(&[
        "pmf",
        "nm",
        "-n",
        "2",
        "-p",
        "3/10,1/5",
        "--enumerate",
        "--epsilon",
        "1e-8",
    ]);
    assert!(out.status.success());
    let doc = LawDocument::from_json(&stdout(&out)).unwrap();
    let law = doc.to_law().unwrap();
    assert!(law.tail_mass() <= 1e-8 * (1.0 + 1e-9) + 1e-15);
    let again = LawDocument::from_json(&doc.to_json()).unwrap();
    assert_eq!(doc, again);
}

#[test]
fn distance_hand_values() {
    let h = mih(&[
        "distance",
        "--metric",
        "hellinger",
        "--a",
        "mih",
        "--b",
        "nm",
        "-N",
        "4",
        "-n",
        "1",
        "-p",
        "1/2",
    ]);
    assert!(h.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&h)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.2588190451025208).abs() < 1e-9);

    let tv = mih(&[
        "distance", "--metric", "tv", "--a", "mih", "--b", "nm", "-N", "4", "-n", "1", "-p", "1/2",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&tv)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.125).abs() < 1e-9);

    let same = mih(&[
        "distance", "--metric", "tv", "--a", "mih", "--b", "mih", "-N", "4", "-n", "1", "-p", "1/2",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&same)).unwrap();
    assert_eq!(v["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn distance_rejects_incompatible_inputs() {
    let out = mih(&[
        "distance", "--metric", "kl", "--a", "mih", "--b", "normal-q", "-N", "20", "-n", "1", "-p",
        "1/5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = mih(&[
        "distance",
        "--metric",
        "kolmogorov",
        "--a",
        "mih",
        "--b",
        "nm",
        "-N",
        "4",
        "-n",
        "1",
        "-p",
        "1/2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_is_deterministic_per_seed() {
    let args = [
        "sample", "mih", "-N", "12", "-n", "2", "-p", "1/3", "--draws", "50", "--seed", "9",
        "--format", "csv",
    ];
    let a = mih(&args);
    let b = mih(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut other = args;
    other[10] = "10";
    let c = mih(&other);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn expansion_check_skips_out_of_region_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.toml");
    // First cell is valid; second sits outside the region at every N.
    std::fs::write(
        &cfg,
        r#"
[expansion]
doublings = 5
[[expansion.cells]]
n = 2
weights = ["1/2"]
k = [2]
base_population = 64
[[expansion.cells]]
n = 1
weights = ["1/8"]
k = [16]
base_population = 16
"#,
    )
    .unwrap();
    let out = mih(&["expansion-check", "--config", cfg.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "exit must be unaffected by skipped cells"
    );
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("skipped"), "stderr: {err}");
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["pass"].as_bool().unwrap());
    assert!(!v["skipped"].as_array().unwrap().is_empty());
}

#[test]
fn expansion_check_zero_residual_cell() {
    // k = 0 with a single failure: the expansion is exact; residuals are
    // identically zero and the cell cannot fail.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.toml");
    std::fs::write(
        &cfg,
        r#"
[expansion]
doublings = 5
[[expansion.cells]]
n = 1
weights = ["1/2"]
k = [0]
base_population = 64
"#,
    )
    .unwrap();
    let out = mih(&["expansion-check", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for row in v["rows"].as_array().unwrap() {
        if row["order"].as_u64().unwrap() == 2 {
            assert!(row["residual"].as_f64().unwrap().abs() < 1e-13);
        }
    }
}

#[test]
fn bounds_report_rejects_populations_below_cube_rule() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bounds.toml");
    std::fs::write(
        &cfg,
        r#"
[bounds]
families = ["q"]
deficiency_n = [16]
deficiency_populations = [100]
deficiency_weights = [["1/5"]]
shape_n = [6]
shape_weights = [["1/5"]]
concentration_populations = [20]
"#,
    )
    .unwrap();
    let out = mih(&["bounds-report", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "skipped rows must not fail the run");
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let skipped = v["skipped"].as_array().unwrap();
    assert!(
        skipped.iter().any(|s| s.as_str().unwrap().contains("n^3")),
        "skipped: {skipped:?}"
    );
}

#[test]
fn sweep_emits_sorted_rows_and_logs_skips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    // N = 17 violates the lattice for p = 1/2 and must be skipped.
    std::fs::write(
        &cfg,
        r#"
[sweep]
metrics = ["hellinger", "tv"]
pairs = [["mih", "nm"]]
n = [1, 2]
populations = [16, 17, 32]
weights = [["1/2"]]
"#,
    )
    .unwrap();
    let out = mih(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .collect();
    // Header + 2 n-values * 2 valid N * 2 metrics.
    assert_eq!(rows.len(), 1 + 8, "rows: {rows:?}");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("lattice"), "stderr: {err}");
}

#[test]
fn help_documents_all_subcommands() {
    let out = mih(&["--help"]);
    let text = stdout(&out);
    for sub in [
        "pmf",
        "sample",
        "distance",
        "expansion-check",
        "bounds-report",
        "sweep",
    ] {
        assert!(text.contains(sub), "help missing {sub}");
    }
    for flag in ["--seed", "--jobs", "--format", "--out", "--config"] {
        assert!(text.contains(flag), "help missing {flag}");
    }
}
