//! Black-box tests of the grassp binary: output strings and exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grassp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

/// Writes `content` to a scratch file and returns its path.
fn scratch_file(name: &str, content: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("grassp-test-{}-{name}", std::process::id()));
    fs::write(&path, content).expect("write scratch file");
    path
}

fn second_max_path() -> String {
    format!("{}/../core/benchmarks/second-max.gsp", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn synthesize_reports_the_decomposition_on_one_line() {
    let out = run(&["synthesize", "--bench", "array-count"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().next(), Some("SyntNoPrefix +"));

    let out = run(&["synthesize", "--bench", "is-sorted"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().next(), Some("SyntConstPrefix min prefix_length=1"));

    let out = run(&["synthesize", "--bench", "seen-2-after-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out).lines().next(),
        Some("SyntCondPrefix max prefix_cond=(= elem 2)")
    );
}

#[test]
fn synthesize_prints_search_statistics() {
    let out = run(&["synthesize", "--bench", "array-max"]);
    let text = stdout(&out);
    assert!(
        text.contains("tried 3 candidate(s)"),
        "missing stats line: {text}"
    );
}

#[test]
fn synthesize_from_file_reports_unknown_with_exit_2() {
    let out = run(&["synthesize", "--program", &second_max_path()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out).lines().next(), Some("unknown"));
}

#[test]
fn synthesize_rejects_infeasible_bounds() {
    let out = run(&["synthesize", "--bench", "array-count", "--segments", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("total length 9"), "stderr: {err}");
    assert!(err.contains("max-const-prefix"), "stderr: {err}");
}

#[test]
fn verify_accepts_a_correct_decomposition() {
    let out = run(&["verify", "--bench", "is-sorted", "--merge", "min", "--prefix-const", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().next(), Some("Valid"));
}

#[test]
fn verify_reports_the_first_counterexample() {
    let out = run(&["verify", "--bench", "is-sorted", "--merge", "min", "--prefix-none"]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.contains("segments [1] [0]"), "{text}");
    assert!(text.contains("expected 0"), "{text}");
    assert!(text.contains("actual 1"), "{text}");

    let out = run(&["verify", "--bench", "array-max", "--merge", "add"]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.contains("segments [1] [1]"), "{text}");
    assert!(text.contains("expected 1"), "{text}");
    assert!(text.contains("actual 2"), "{text}");
}

#[test]
fn verify_honors_an_explicit_domain() {
    // Over a single-value domain every segment holds the same maximum, so
    // adding the two worker outputs happens to be right only when that
    // value is 0, making this pass vacuously tight.
    let out = run(&["verify", "--bench", "array-max", "--merge", "add", "--domain", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().next(), Some("Valid"));
}

#[test]
fn verify_rejects_an_unparseable_condition() {
    let out = run(&[
        "verify",
        "--bench",
        "seen-2-after-1",
        "--merge",
        "max",
        "--prefix-cond",
        "(= elem",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error:"), "{}", stderr(&out));
}

#[test]
fn run_executes_a_large_input_with_cross_check() {
    let numbers: Vec<String> = (1..=1000).map(|n| n.to_string()).collect();
    let input = scratch_file("range.txt", &numbers.join(" "));
    let out = run(&[
        "run",
        "--bench",
        "array-max",
        "--merge",
        "max",
        "--input",
        input.to_str().unwrap(),
        "--segments",
        "4",
    ]);
    let _ = fs::remove_file(&input);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("output 1000"));
    assert!(text.contains("cross-check OK"), "{text}");
    assert!(text.contains("T_s = 1000"), "{text}");
}

#[test]
fn run_reports_prefix_lengths_for_sorted_input() {
    let numbers: Vec<String> = (0..100).map(|n| n.to_string()).collect();
    let input = scratch_file("sorted.txt", &numbers.join("\n"));
    let out = run(&[
        "run",
        "--bench",
        "is-sorted",
        "--merge",
        "min",
        "--prefix-const",
        "1",
        "--input",
        input.to_str().unwrap(),
        "--segments",
        "3",
    ]);
    let _ = fs::remove_file(&input);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("output 1"));
    assert!(text.contains("p = (0, 1, 1)"), "{text}");
    assert!(text.contains("s = (34, 33, 33)"), "{text}");
}

#[test]
fn run_handles_a_conditional_prefix() {
    let input = scratch_file("two-one.txt", "2 1");
    let out = run(&[
        "run",
        "--bench",
        "seen-2-after-1",
        "--merge",
        "max",
        "--prefix-cond",
        "(= elem 2)",
        "--input",
        input.to_str().unwrap(),
    ]);
    let _ = fs::remove_file(&input);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().next(), Some("output 0"));
}

#[test]
fn run_flags_a_wrong_decomposition_with_exit_3() {
    let input = scratch_file("mismatch.txt", "1 2");
    let out = run(&[
        "run",
        "--bench",
        "array-max",
        "--merge",
        "add",
        "--input",
        input.to_str().unwrap(),
    ]);
    let _ = fs::remove_file(&input);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("cross-check MISMATCH"), "{}", stdout(&out));
}

#[test]
fn run_rejects_malformed_input_tokens() {
    let input = scratch_file("junk.txt", "1 2 banana");
    let out = run(&[
        "run",
        "--bench",
        "array-max",
        "--merge",
        "max",
        "--input",
        input.to_str().unwrap(),
    ]);
    let _ = fs::remove_file(&input);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("banana"), "{}", stderr(&out));
}

#[test]
fn missing_program_file_is_an_error() {
    let out = run(&["synthesize", "--program", "/nonexistent/nowhere.gsp"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error:"), "{}", stderr(&out));
}

#[test]
fn unknown_benchmark_names_list_the_corpus() {
    let out = run(&["synthesize", "--bench", "array-mix"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("alternation-of-11-22"), "{}", stderr(&out));
}

#[test]
fn conflicting_prefix_flags_are_a_usage_error() {
    let out = run(&[
        "verify",
        "--bench",
        "is-sorted",
        "--merge",
        "min",
        "--prefix-none",
        "--prefix-const",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_text_format_summarizes_the_table() {
    let out = run(&["bench"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("7/7 rows match the expected table"), "{text}");
    assert!(text.contains("alternation-of-11-22"), "{text}");
}

#[test]
fn bench_with_a_crippled_menu_fails_and_exits_nonzero() {
    let out = run(&["bench", "--merge-menu", "first,last", "--format", "tsv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let max_row: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("array-max\t"))
        .expect("array-max row")
        .split('\t')
        .collect();
    assert_eq!(max_row[2], "unknown");
    assert_eq!(max_row[6], "FAIL");
}
