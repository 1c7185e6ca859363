//! CLI contract tests: exit codes, output schema, determinism, and the
//! documented examples of each subcommand.

use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fuzzylim")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env("FUZZY_LIMIT_LEVELS", "21")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn limit_exit_codes_cover_every_outcome_class() {
    // converged -> 0
    let out = run(&["limit", "--expr", "x + 2", "--at", r#"{"kind":"singleton","value":1}"#]);
    assert_eq!(out.status.code(), Some(0));

    // divergence -> 2
    let out = run(&["limit", "--expr", "1/x^2", "--at", r#"{"kind":"singleton","value":0}"#]);
    assert_eq!(out.status.code(), Some(2));

    // no limit -> 3
    let out = run(&[
        "limit",
        "--expr",
        "abs(sin(x))/sin(x)",
        "--at",
        r#"{"kind":"singleton","value":0}"#,
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["result"]["outcome"], "no_limit");
    assert_eq!(v["result"]["reason"], "one_sided_mismatch");

    // undetermined -> 4 (left of zero, sqrt undefined on every box)
    let out = run(&[
        "limit",
        "--expr",
        "sqrt(x)",
        "--at",
        r#"{"kind":"singleton","value":0}"#,
        "--side",
        "left",
    ]);
    assert_eq!(out.status.code(), Some(4));

    // parse error -> 1, nothing on stdout
    let out = run(&["limit", "--expr", "x +", "--at", "inf"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn limit_output_schema_is_stable() {
    let out = run(&[
        "limit",
        "--expr",
        "x^2 + x - 3",
        "--at",
        r#"{"kind":"singleton","value":1}"#,
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["query"], "x^2 + x - 3");
    assert_eq!(v["mode"], "paper");
    assert!(v["certificate"].is_null());
    assert!(v["timing_ms"].is_number());
    let table = v["alpha_table"].as_array().unwrap();
    assert_eq!(table.len(), 20);
    let mut prev = 0.0;
    for row in table {
        let alpha = row[0].as_f64().unwrap();
        let lo = row[1].as_f64().unwrap();
        let hi = row[2].as_f64().unwrap();
        assert!(alpha > prev, "alpha_table must ascend");
        assert!(lo <= hi);
        prev = alpha;
    }
}

#[test]
fn limit_with_certificate_records_witnesses() {
    let out = run(&[
        "limit",
        "--expr",
        "x + 2",
        "--at",
        r#"{"kind":"singleton","value":1}"#,
        "--certify",
        "0.1,0.01",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let entries = v["certificate"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 20);
    for entry in entries {
        let ws = entry["witnesses"].as_array().unwrap();
        assert_eq!(ws.len(), 2);
        assert!(entry["failed_eps"].as_array().unwrap().is_empty());
        // smaller ε, smaller (or equal) δ
        assert!(ws[1]["witness"].as_f64().unwrap() <= ws[0]["witness"].as_f64().unwrap());
    }
}

#[test]
fn limit_csv_format_is_diff_stable() {
    let args = [
        "limit",
        "--expr",
        "x + 2",
        "--at",
        r#"{"kind":"singleton","value":1}"#,
        "--format",
        "csv",
    ];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("alpha,lo,hi"));
    let first = lines.next().unwrap();
    assert_eq!(first, "0.0500000000000,3.00000000000,3.00000000000");
}

#[test]
fn eval_linear_scaling_of_triangular() {
    // oracle: cut of 2x over tri(0, 0.5, 1) at α is [α, 2 - α]
    let out = run(&[
        "eval",
        "--expr",
        "2*x",
        "--x",
        r#"{"kind":"triangular","a":0,"b":0.5,"c":1}"#,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["result"]["outcome"], "evaluated");
    for row in v["alpha_table"].as_array().unwrap() {
        let (alpha, lo, hi) = (
            row[0].as_f64().unwrap(),
            row[1].as_f64().unwrap(),
            row[2].as_f64().unwrap(),
        );
        assert!((lo - alpha).abs() <= 1e-12, "lo at alpha {alpha}");
        assert!((hi - (2.0 - alpha)).abs() <= 1e-12, "hi at alpha {alpha}");
    }
}

#[test]
fn eval_division_by_zero_is_exit_five() {
    let out = run(&["eval", "--expr", "x/0", "--x", r#"{"kind":"singleton","value":3}"#]);
    assert_eq!(out.status.code(), Some(5));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("alpha"), "offending alpha reported: {err}");
}

#[test]
fn eval_identity_on_singleton() {
    let out = run(&["eval", "--expr", "x", "--x", r#"{"kind":"singleton","value":7}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for row in v["alpha_table"].as_array().unwrap() {
        assert_eq!(row[1].as_f64().unwrap(), 7.0);
        assert_eq!(row[2].as_f64().unwrap(), 7.0);
    }
}

#[test]
fn membership_samples_triangular_and_singleton() {
    let out = run(&[
        "membership",
        "--number",
        r#"{"kind":"triangular","a":0,"b":0.5,"c":1}"#,
        "--from",
        "0",
        "--to",
        "1",
        "--points",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,grade"));
    let grades: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    // analytic grades 0, 0.5, 1, 0.5, 0 within the grid resolution (1/20)
    let want = [0.0, 0.5, 1.0, 0.5, 0.0];
    assert_eq!(grades.len(), want.len());
    for (g, w) in grades.iter().zip(want) {
        assert!((g - w).abs() <= 0.05 + 1e-12, "grade {g} vs {w}");
    }

    let out = run(&[
        "membership",
        "--number",
        r#"{"kind":"singleton","value":2}"#,
        "--from",
        "3",
        "--to",
        "4",
        "--points",
        "5",
    ]);
    for line in stdout(&out).lines().skip(1) {
        assert_eq!(line.split(',').nth(1), Some("0"));
    }

    let out = run(&[
        "membership",
        "--number",
        r#"{"kind":"singleton","value":2}"#,
        "--from",
        "0",
        "--to",
        "1",
        "--points",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_fixture_suite_is_clean_and_deterministic() {
    let args = ["verify", "--suite", "all", "--seed", "42", "--levels", "11"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let text_a = stdout(&a);
    let text_b = stdout(&run(&args));
    assert_eq!(text_a, text_b, "same seed must reproduce identical reports");

    let mut seen = 0;
    for line in text_a.lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("JSONL report");
        assert!(v["theorem"].is_string());
        assert!(matches!(
            v["status"].as_str().unwrap(),
            "Holds" | "Fails" | "Inapplicable"
        ));
        assert_ne!(v["status"], "Fails");
        assert!(v["max_alpha_gap"].is_number());
        assert!(v["notes"].is_string());
        seen += 1;
    }
    assert!(seen >= 10, "expected a full report stream, got {seen}");
}

#[test]
fn verify_algebra_overrides() {
    let out = run(&[
        "verify",
        "--suite",
        "algebra",
        "--f",
        "x^2",
        "--g",
        "x",
        "--at",
        r#"{"kind":"singleton","value":1}"#,
        "--levels",
        "11",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    for v in &lines {
        assert!(matches!(v["status"].as_str().unwrap(), "Holds" | "Inapplicable"));
    }
}

#[test]
fn verify_rejects_unknown_suite() {
    let out = run(&["verify", "--suite", "nosuch"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn levels_env_var_controls_grid_size() {
    let out = Command::new(bin())
        .args(["eval", "--expr", "x", "--x", r#"{"kind":"singleton","value":1}"#])
        .env("FUZZY_LIMIT_LEVELS", "6")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["alpha_table"].as_array().unwrap().len(), 5);

    // the flag wins over the environment
    let out = Command::new(bin())
        .args([
            "eval",
            "--expr",
            "x",
            "--x",
            r#"{"kind":"singleton","value":1}"#,
            "--levels",
            "11",
        ])
        .env("FUZZY_LIMIT_LEVELS", "6")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["alpha_table"].as_array().unwrap().len(), 10);
}

#[test]
fn expr_reads_stdin_when_dash() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(bin())
        .args(["limit", "--expr", "-", "--at", r#"{"kind":"singleton","value":1}"#])
        .env("FUZZY_LIMIT_LEVELS", "11")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(b"x^2 + x - 3\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(v["query"], "x^2 + x - 3");
}
