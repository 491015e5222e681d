//! End-to-end tests of the `crgc` binary: output formats, determinism, and
//! the 0/1/2 exit-code contract.

use std::path::PathBuf;
use std::process::{Command, Output};

fn crgc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crgc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn scenario_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/example3.scenario")
}

#[test]
fn tradeoff_two_points_are_the_extremes() {
    let out = crgc(&[
        "tradeoff", "--n", "14", "--k", "6", "--d", "10", "--t", "3", "-B", "18", "--points", "2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma,alpha,regime");
    assert_eq!(lines[1], "90/7,3,MS");
    // MB: alpha = 2*18*10/(6*17) = 60/17, gamma = 3*alpha = 180/17
    assert_eq!(lines[2], "180/17,60/17,MB");
    assert_eq!(lines.len(), 3);
}

#[test]
fn tradeoff_rejects_one_point() {
    let out = crgc(&[
        "tradeoff", "--n", "14", "--k", "6", "--d", "10", "--t", "3", "-B", "18", "--points", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("at least 2"));
}

#[test]
fn tradeoff_rejects_bad_params() {
    let out = crgc(&["tradeoff", "--n", "5", "--k", "6", "--d", "10", "--t", "3", "-B", "18"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tradeoff_float_columns() {
    let out = crgc(&[
        "tradeoff", "--n", "14", "--k", "6", "--d", "10", "--t", "3", "-B", "18", "--points", "2",
        "--float",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("gamma,alpha,regime,gamma_float,alpha_float\n"));
    assert!(text.contains("90/7,3,MS,12.857143,3.000000"));
}

#[test]
fn capacity_regimes_and_brute_agreement() {
    for (alpha, want) in [("2", "12"), ("3", "16"), ("4", "17")] {
        let out = crgc(&[
            "capacity", "--n", "14", "--k", "6", "--d", "10", "--t", "3", "-B", "18", "--alpha",
            alpha, "--beta", "1", "--brute",
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        let text = stdout(&out);
        assert!(text.contains(&format!("capacity: {want}\n")), "{text}");
        assert!(text.contains("agreement: true"), "{text}");
    }
}

#[test]
fn capacity_accepts_rational_alpha() {
    let out = crgc(&[
        "capacity", "--n", "14", "--k", "7", "--d", "10", "--t", "3", "-B", "21", "--alpha", "9/4",
        "--beta", "1",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("composition: ["));
    let bad = crgc(&[
        "capacity", "--n", "14", "--k", "7", "--d", "10", "--t", "3", "--alpha", "x", "--beta", "1",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn simulate_example_scenario_ledger() {
    let path = scenario_path();
    let out = crgc(&["simulate", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("ingress=10"), "{text}");
    assert!(text.contains("ingress=6"), "{text}");
    assert!(text.contains("total_ingress: 38"), "{text}");
    assert!(text.contains("final_nodes: 10"), "{text}");
}

#[test]
fn simulate_is_deterministic_and_seed_sensitive() {
    let path = scenario_path();
    let a = stdout(&crgc(&["simulate", path.to_str().unwrap()]));
    let b = stdout(&crgc(&["simulate", path.to_str().unwrap()]));
    assert_eq!(a, b);
    let c = stdout(&crgc(&["simulate", path.to_str().unwrap(), "--seed", "99"]));
    assert_ne!(a, c);
    // ledger totals are seed-independent
    let totals = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| l.starts_with("total_") || l.starts_with("event"))
            .map(|l| {
                l.split_whitespace()
                    .filter(|w| w.starts_with("ingress=") || w.starts_with("links="))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    };
    assert_eq!(totals(&a), totals(&c));
}

#[test]
fn simulate_corrupt_file_exits_2() {
    let dir = std::env::temp_dir();
    let path = dir.join("crgc_corrupt.scenario");
    std::fs::write(&path, "schema: 1\nb: twelve\nn: 7\n").unwrap();
    let out = crgc(&["simulate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
    let missing = crgc(&["simulate", "/nonexistent/file.scenario"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn simulate_invariant_failure_exits_1() {
    let dir = std::env::temp_dir();
    let path = dir.join("crgc_impossible.scenario");
    std::fs::write(
        &path,
        "schema: 1\nb: 12\nn: 7\nk: 4\nd: 5\nt: 2\nfail 0 1 2 3 4\nrepair auto\n",
    )
    .unwrap();
    let out = crgc(&["simulate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("event 1"), "{}", stderr(&out));
}

#[test]
fn compare_table() {
    let out = crgc(&["compare", "--n", "7", "--k", "4", "--d", "5", "--t", "2", "-B", "12"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("mechanism,bandwidth,links\n"));
    assert!(text.contains("concurrent-ms,10,5"), "{text}");
    assert!(text.contains("cooperative-mscr,12,11"), "{text}");
}

#[test]
fn verify_paper_checklist_passes() {
    let out = crgc(&["verify-paper"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let check_lines = text
        .lines()
        .filter(|l| l.starts_with("check ") && l.ends_with(": pass"))
        .count();
    assert_eq!(check_lines, 7, "{text}");
    assert!(!text.contains("FAIL"), "{text}");
    assert!(text.trim_end().ends_with("overall: pass"), "{text}");
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir();
    let path = dir.join("crgc_curve.csv");
    let out = crgc(&[
        "tradeoff", "--n", "14", "--k", "6", "--d", "10", "--t", "3", "-B", "18", "--points", "2",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("gamma,alpha,regime\n"));
}
