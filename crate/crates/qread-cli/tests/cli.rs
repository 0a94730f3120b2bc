//! End-to-end runs of the compiled binary: exit codes, output formats,
//! config-file precedence, and IDX ingestion — all on synthetic corpora
//! small enough to verify every number by hand.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qread_core::gaussian::{self, TransmissivityPair};
use tempfile::TempDir;

fn qread(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qread"))
        .args(args)
        .output()
        .expect("the binary spawns")
}

fn stdout_ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("output is UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("terminated by exit, not a signal")
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Splits CSV output into (comment lines, header fields, data rows).
fn parse_csv(text: &str) -> (Vec<String>, Vec<String>, Vec<Vec<String>>) {
    let comments = text
        .lines()
        .filter(|l| l.starts_with('#'))
        .map(str::to_owned)
        .collect();
    let mut data = text.lines().filter(|l| !l.starts_with('#'));
    let header = data
        .next()
        .expect("a header line")
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = data
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    (comments, header, rows)
}

fn field<'a>(header: &[String], row: &'a [String], name: &str) -> &'a str {
    let i = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column named {name} in {header:?}"));
    &row[i]
}

fn float_field(header: &[String], row: &[String], name: &str) -> f64 {
    field(header, row, name)
        .parse()
        .unwrap_or_else(|_| panic!("column {name} holds a float"))
}

fn write_idx_images(path: &Path, width: u32, height: u32, images: &[Vec<u8>]) {
    let mut bytes = Vec::new();
    bytes.extend_from_slice(&0x0000_0803u32.to_be_bytes());
    bytes.extend_from_slice(&(images.len() as u32).to_be_bytes());
    bytes.extend_from_slice(&height.to_be_bytes());
    bytes.extend_from_slice(&width.to_be_bytes());
    for image in images {
        bytes.extend_from_slice(image);
    }
    fs::write(path, bytes).expect("temp dir is writable");
}

fn write_idx_labels(path: &Path, labels: &[u8]) {
    let mut bytes = Vec::new();
    bytes.extend_from_slice(&0x0000_0801u32.to_be_bytes());
    bytes.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    bytes.extend_from_slice(labels);
    fs::write(path, bytes).expect("temp dir is writable");
}

/// 2x2 toy corpus. Class 0 is two blank images; class 1 is a 3-hot and a
/// 4-hot image, so the cross-class distances are {3, 3, 4, 4}: mean 3.5,
/// population sigma 0.5, minimum 3. The test split holds one exact copy of
/// each class.
fn toy_corpus() -> TempDir {
    let dir = tempfile::tempdir().expect("temp dir");
    const W: u8 = 200; // >= the default threshold 128, so a white bit
    let train = vec![
        vec![0, 0, 0, 0],
        vec![0, 0, 0, 0],
        vec![W, W, W, 0],
        vec![W, W, W, W],
    ];
    write_idx_images(&dir.path().join("train-images-idx3-ubyte"), 2, 2, &train);
    write_idx_labels(&dir.path().join("train-labels-idx1-ubyte"), &[0, 0, 1, 1]);
    let test = vec![vec![0, 0, 0, 0], vec![W, W, W, W]];
    write_idx_images(&dir.path().join("t10k-images-idx3-ubyte"), 2, 2, &test);
    write_idx_labels(&dir.path().join("t10k-labels-idx1-ubyte"), &[0, 1]);
    dir
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(exit_code(&qread(&["--definitely-not-a-flag"])), 2);

    let out = qread(&["fidelity", "--probes", "2", "--n-total", "5"]);
    assert_eq!(exit_code(&out), 2, "{}", stderr_text(&out));

    let out = qread(&["bounds", "--mode", "kcpf"]);
    assert_eq!(exit_code(&out), 2, "{}", stderr_text(&out));

    let dir = toy_corpus();
    let dir_arg = dir.path().to_str().unwrap();
    let out = qread(&["dataset-stats", "--dataset-dir", dir_arg, "--samples", "10"]);
    assert_eq!(exit_code(&out), 2, "{}", stderr_text(&out));
}

#[test]
fn numeric_domain_errors_exit_4() {
    let out = qread(&["fidelity", "--eta-b", "1.5"]);
    assert_eq!(exit_code(&out), 4);
    assert!(
        stderr_text(&out).starts_with("error:"),
        "diagnostics go to stderr: {}",
        stderr_text(&out)
    );
}

#[test]
fn data_errors_exit_3() {
    let out = qread(&["dataset-stats", "--dataset-dir", "/nonexistent-qread-dir"]);
    assert_eq!(exit_code(&out), 3, "{}", stderr_text(&out));
}

#[test]
fn fidelity_defaults_match_the_library() {
    let text = stdout_ok(&qread(&["fidelity"]));
    let (comments, header, rows) = parse_csv(&text);
    assert!(comments.iter().any(|c| c == "# schema: qread.fidelity.v1"));
    assert_eq!(rows.len(), 1);
    let row = &rows[0];

    let pair = TransmissivityPair::new(0.9, 0.95).unwrap();
    let (delta_q, delta_c) = gaussian::delta_coefficients(&pair);
    let f_q = gaussian::fidelity_quantum(1.0, &pair).unwrap();
    let f_c = gaussian::fidelity_classical(1.0, &pair).unwrap();

    assert_eq!(float_field(&header, row, "eta_b"), 0.9);
    assert_eq!(float_field(&header, row, "eta_w"), 0.95);
    assert_eq!(float_field(&header, row, "n_signal"), 1.0);
    assert_eq!(field(&header, row, "probes"), "1");
    assert_eq!(float_field(&header, row, "n_total"), 1.0);
    // Shortest round-trip formatting means parsing back recovers the exact
    // f64 the library produced.
    assert_eq!(float_field(&header, row, "delta_q"), delta_q);
    assert_eq!(float_field(&header, row, "delta_c"), delta_c);
    assert_eq!(float_field(&header, row, "fidelity_q"), f_q);
    assert_eq!(float_field(&header, row, "fidelity_c"), f_c);
    assert_eq!(float_field(&header, row, "budget_fidelity_q"), f_q);
    assert_eq!(
        float_field(&header, row, "asymptotic_fidelity_q"),
        gaussian::asymptotic_fidelity_power(1.0, delta_q).unwrap()
    );
}

#[test]
fn equal_transmissivities_are_indistinguishable() {
    let text = stdout_ok(&qread(&["fidelity", "--eta-b", "0.7", "--eta-w", "0.7"]));
    let (_, header, rows) = parse_csv(&text);
    let row = &rows[0];
    assert_eq!(float_field(&header, row, "delta_q"), 0.0);
    assert_eq!(float_field(&header, row, "delta_c"), 0.0);
    assert_eq!(float_field(&header, row, "fidelity_q"), 1.0);
    assert_eq!(float_field(&header, row, "fidelity_c"), 1.0);
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let args = ["fidelity", "--grid", "1,5,25"];
    let csv_text = stdout_ok(&qread(&args));
    let json_text = stdout_ok(&qread(&[&args[..], &["--format", "json"]].concat()));

    let (_, header, rows) = parse_csv(&csv_text);
    let doc: serde_json::Value = serde_json::from_str(&json_text).expect("valid JSON");
    assert_eq!(doc["schema"], "qread.fidelity.v1");
    let json_rows = doc["rows"].as_array().expect("rows array");
    assert_eq!(json_rows.len(), rows.len());
    for (row, json_row) in rows.iter().zip(json_rows) {
        for name in ["n_total", "fidelity_q", "budget_fidelity_c"] {
            let csv_value = float_field(&header, row, name);
            let json_value = json_row[name].as_f64().expect("a number");
            assert_eq!(csv_value, json_value, "column {name}");
        }
    }
}

#[test]
fn config_file_supplies_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(&config, r#"{"eta-b": 0.8, "eta-w": 0.9, "format": "json"}"#).unwrap();

    let out = qread(&["fidelity", "--config", config.to_str().unwrap(), "--eta-b", "0.85"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout_ok(&out)).expect("json from config");
    assert_eq!(doc["config"]["eta-b"].as_f64(), Some(0.85), "flag beats config");
    assert_eq!(doc["config"]["eta-w"].as_f64(), Some(0.9), "config fills the gap");
    assert_eq!(doc["rows"][0]["eta_b"].as_f64(), Some(0.85));
}

#[test]
fn bad_config_files_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();

    let unknown = dir.path().join("unknown.json");
    fs::write(&unknown, r#"{"eta-borked": 1.0}"#).unwrap();
    let out = qread(&["fidelity", "--config", unknown.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_text(&out).contains("eta-borked"));

    let nonobject = dir.path().join("list.json");
    fs::write(&nonobject, "[1, 2]").unwrap();
    let out = qread(&["fidelity", "--config", nonobject.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn toy_dataset_statistics_are_exact_by_hand() {
    let dir = toy_corpus();
    let dir_arg = dir.path().to_str().unwrap();

    let text = stdout_ok(&qread(&["dataset-stats", "--dataset-dir", dir_arg]));
    let (comments, header, rows) = parse_csv(&text);
    assert_eq!(rows.len(), 1, "one populated class pair");
    let row = &rows[0];
    assert_eq!(field(&header, row, "class_a"), "0");
    assert_eq!(field(&header, row, "class_b"), "1");
    assert_eq!(field(&header, row, "pairs"), "4");
    assert_eq!(float_field(&header, row, "mu"), 3.5);
    assert_eq!(float_field(&header, row, "sigma"), 0.5);
    assert_eq!(field(&header, row, "h_min"), "3");
    assert_eq!(field(&header, row, "cross_duplicates"), "0");
    assert!(comments.iter().any(|c| c == "# h-min: 3"), "{comments:?}");
    assert!(comments.iter().any(|c| c == "# images: 4"), "{comments:?}");

    let text = stdout_ok(&qread(&[
        "dataset-stats",
        "--dataset-dir",
        dir_arg,
        "--emit",
        "histograms",
    ]));
    let (_, header, rows) = parse_csv(&text);
    let bins: Vec<(String, String)> = rows
        .iter()
        .map(|r| {
            (
                field(&header, r, "distance").to_owned(),
                field(&header, r, "count").to_owned(),
            )
        })
        .collect();
    assert_eq!(
        bins,
        vec![
            ("3".to_owned(), "2".to_owned()),
            ("4".to_owned(), "2".to_owned())
        ],
        "only populated bins appear"
    );
}

#[test]
fn corrupt_idx_files_fail_with_byte_context() {
    let dir = toy_corpus();
    let images = dir.path().join("train-images-idx3-ubyte");
    let dir_arg = dir.path().to_str().unwrap();

    let mut bytes = fs::read(&images).unwrap();
    let good = bytes.clone();
    bytes[3] = 0x04; // magic becomes 0x00000804
    fs::write(&images, &bytes).unwrap();
    let out = qread(&["dataset-stats", "--dataset-dir", dir_arg]);
    assert_eq!(exit_code(&out), 3);
    assert!(
        stderr_text(&out).contains("bad magic 0x00000804"),
        "{}",
        stderr_text(&out)
    );

    fs::write(&images, &good[..good.len() - 1]).unwrap();
    let out = qread(&["dataset-stats", "--dataset-dir", dir_arg]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr_text(&out).contains("found 15"), "{}", stderr_text(&out));
}

#[test]
fn toy_nn_curve_hits_both_endpoints() {
    let dir = toy_corpus();
    let text = stdout_ok(&qread(&[
        "nn-curve",
        "--dataset-dir",
        dir.path().to_str().unwrap(),
        "--scale",
        "full",
        "--trials",
        "5",
        "--grid",
        "0:1:3",
        "--seed",
        "11",
    ]));
    let (_, header, rows) = parse_csv(&text);
    assert_eq!(rows.len(), 3);
    // p = 0 leaves exact training copies intact; p = 1 inverts each test
    // image into the other class's exact training copy.
    assert_eq!(float_field(&header, &rows[0], "p"), 0.0);
    assert_eq!(float_field(&header, &rows[0], "error"), 0.0);
    assert_eq!(float_field(&header, &rows[2], "p"), 1.0);
    assert_eq!(float_field(&header, &rows[2], "error"), 1.0);
}

#[test]
fn nn_curve_output_is_thread_count_invariant() {
    let dir = toy_corpus();
    let dir_arg = dir.path().to_str().unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for threads in ["1", "2"] {
        let path = out_dir.path().join(format!("curve-{threads}.csv"));
        let out = qread(&[
            "nn-curve",
            "--dataset-dir",
            dir_arg,
            "--scale",
            "full",
            "--trials",
            "7",
            "--grid",
            "0:1:5",
            "--seed",
            "3",
            "--threads",
            threads,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr_text(&out));
        assert!(out.stdout.is_empty(), "--out silences stdout");
        bytes.push(fs::read(&path).unwrap());
    }
    assert_eq!(bytes[0], bytes[1], "worker count must not change a byte");
}

#[test]
fn pipeline_consumes_the_nn_curve_file() {
    let dir = toy_corpus();
    let out_dir = tempfile::tempdir().unwrap();
    let curve_path = out_dir.path().join("curve.json");
    let out = qread(&[
        "nn-curve",
        "--dataset-dir",
        dir.path().to_str().unwrap(),
        "--scale",
        "full",
        "--trials",
        "20",
        "--grid",
        "0:1:5",
        "--seed",
        "5",
        "--format",
        "json",
        "--out",
        curve_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_text(&out));

    let text = stdout_ok(&qread(&[
        "pipeline",
        "--curve",
        curve_path.to_str().unwrap(),
        "--grid",
        "0,100",
    ]));
    let (comments, header, rows) = parse_csv(&text);
    assert!(comments.iter().any(|c| c == "# curve-source: \"file\""));
    assert_eq!(rows.len(), 8, "four sources times two budgets");
    for row in &rows {
        let (e_lo, e_hi) = (
            float_field(&header, row, "e_lower"),
            float_field(&header, row, "e_upper"),
        );
        assert!(e_lo <= e_hi, "interval order in {row:?}");
    }
    // Zero energy means a coin-flip pixel regardless of receiver.
    for row in rows.iter().filter(|r| field(&header, r, "n_total") == "0") {
        assert_eq!(float_field(&header, row, "p_upper"), 0.5);
    }
}
