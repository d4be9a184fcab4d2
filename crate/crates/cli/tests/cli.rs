use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn dcsort(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dcsort"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn dcsort");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

fn oracle(a: &[i64]) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::new();
    for &x in a {
        let k = out.iter().rposition(|&y| y <= x).map_or(0, |k| k + 1);
        out.insert(k, x);
    }
    out
}

fn lines(a: &[i64]) -> String {
    a.iter().map(|x| format!("{x}\n")).collect()
}

#[test]
fn sort_matches_oracle_for_every_algorithm_and_mode() {
    let inputs = ["3 1 2", "5\n-1  5\t0\n", "7", "2 2 2 1 1", "-9223372036854775808 9223372036854775807 0"];
    for algo in ["rec", "iter", "quick"] {
        for mode in ["unchecked", "contracts", "full"] {
            for text in inputs {
                let values: Vec<i64> = text.split_whitespace().map(|t| t.parse().unwrap()).collect();
                let o = dcsort(&["sort", "--algo", algo, "--mode", mode], text);
                assert!(o.status.success(), "{algo} {mode} {text:?}");
                assert_eq!(stdout(&o), lines(&oracle(&values)));
            }
        }
    }
}

#[test]
fn sort_example() {
    let o = dcsort(&["sort", "--algo", "rec"], "3 1 2");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n2\n3\n");
}

#[test]
fn sort_empty_input() {
    let o = dcsort(&["sort", "--algo", "iter"], "");
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn parse_error_exits_2_with_position() {
    let o = dcsort(&["sort"], "3 x 2");
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 1, column 3"), "{err}");
    let o = dcsort(&["sort"], "1 2\n 3 4.5");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2, column 4"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(dcsort(&["sort", "--algo", "heap"], "").status.code(), Some(2));
    assert_eq!(dcsort(&["sort", "--mode", "paranoid"], "").status.code(), Some(2));
    assert_eq!(dcsort(&["verify", "--cases", "0"], "").status.code(), Some(2));
    assert_eq!(dcsort(&["bench"], "").status.code(), Some(2));
    assert_eq!(dcsort(&["sort", "--input", "/no/such/file"], "").status.code(), Some(2));
}

#[test]
fn file_input_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let output = dir.path().join("out.txt");
    std::fs::write(&input, "9 -3\n4\n").unwrap();
    let o = dcsort(
        &["sort", "--algo", "quick", "--input", input.to_str().unwrap(), "--output", output.to_str().unwrap()],
        "",
    );
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&output).unwrap(), "-3\n4\n9\n");
}

#[test]
fn verify_clean_campaign() {
    let o = dcsort(&["verify", "--cases", "100", "--seed", "42"], "");
    assert_eq!(o.status.code(), Some(0));
    let report = json(&o);
    assert_eq!(report["cases_run"], 300);
    assert_eq!(report["seed"], 42);
    assert_eq!(report["violations"], Value::Array(vec![]));
}

#[test]
fn verify_single_empty_case() {
    let o = dcsort(&["verify", "--cases", "1", "--max-len", "0", "--algo", "rec,quick"], "");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["cases_run"], 2);
}

#[test]
fn verify_reports_injected_faults() {
    for fault in [
        "combine-skip",
        "fp-returns-left",
        "merge-iter-no-drain",
        "merge-pair-no-copy-back",
        "partition-no-exchange",
    ] {
        let o = dcsort(&["verify", "--cases", "50", "--inject", fault], "");
        assert_eq!(o.status.code(), Some(1), "{fault}");
        let report = json(&o);
        let found = report["violations"].as_array().unwrap();
        assert!(!found.is_empty(), "{fault}");
        let v = &found[0]["violation"];
        assert_eq!(v["before"].as_array().unwrap().len(), v["after"].as_array().unwrap().len());
        assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    }
}

fn phases(doc: &Value) -> Vec<String> {
    doc["events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["phase"].as_str().unwrap().to_string())
        .collect()
}

fn count(phases: &[String], p: &str) -> usize {
    phases.iter().filter(|x| *x == p).count()
}

#[test]
fn trace_recursive_merge_sort() {
    let o = dcsort(&["trace", "--algo", "rec"], "4 3 2 1");
    assert!(o.status.success());
    assert!(stdout(&o).ends_with('\n'));
    let doc = json(&o);
    assert_eq!(doc["algo"], "rec");
    assert_eq!(doc["n"], 4);
    let p = phases(&doc);
    assert_eq!(p.len(), 10);
    assert_eq!((count(&p, "Divide"), count(&p, "Base"), count(&p, "Combine")), (3, 4, 3));
    // the root's combine closes the trace
    let last = doc["events"].as_array().unwrap().last().unwrap();
    assert_eq!((last["phase"].as_str(), last["l"].as_u64(), last["r"].as_u64()), (Some("Combine"), Some(0), Some(4)));

    let p = phases(&json(&dcsort(&["trace", "--algo", "rec"], "1 2")));
    assert_eq!(p, ["Divide", "Base", "Base", "Combine"]);
}

#[test]
fn trace_field_order() {
    let o = dcsort(&["trace", "--algo", "rec"], "5");
    assert_eq!(
        stdout(&o),
        "{\"algo\":\"rec\",\"n\":1,\"events\":[{\"seq\":0,\"phase\":\"Base\",\"l\":0,\"m\":null,\"r\":1,\"depth\":0,\"s\":null}]}\n"
    );
}

#[test]
fn trace_iterative_merge_sort() {
    let doc = json(&dcsort(&["trace", "--algo", "iter"], "4 3 2 1"));
    let events = doc["events"].as_array().unwrap();
    let s: Vec<u64> = events.iter().map(|e| e["s"].as_u64().unwrap()).collect();
    assert_eq!(s, [1, 2]);
    assert!(events.iter().all(|e| e["phase"] == "LevelPass"));
    let doc = json(&dcsort(&["trace", "--algo", "iter"], "1"));
    assert!(doc["events"].as_array().unwrap().is_empty());
}

#[test]
fn trace_quicksort_is_post_order() {
    let doc = json(&dcsort(&["trace", "--algo", "quick", "--mode", "full"], "3 1 2 5 4"));
    let p = phases(&doc);
    assert_eq!(count(&p, "Divide"), count(&p, "Combine"));
    assert_eq!(p.last().map(String::as_str), Some("Combine"));
}

fn bench_rows(args: &[&str]) -> Vec<Value> {
    let mut full = vec!["bench", "--format", "json"];
    full.extend_from_slice(args);
    let o = dcsort(&full, "");
    assert!(o.status.success());
    json(&o).as_array().unwrap().clone()
}

#[test]
fn bench_examples() {
    let rows = bench_rows(&["--algo", "iter", "--sizes", "1000", "--repeats", "3"]);
    assert_eq!(rows.len(), 1);
    assert!(rows[0]["comparisons"].as_u64().unwrap() <= 1000 * 11);
    assert_eq!(rows[0]["repeats"], 3);

    let rows = bench_rows(&["--algo", "iter", "--sizes", "1", "--repeats", "1"]);
    assert_eq!(rows[0]["comparisons"], 0);

    let rows = bench_rows(&["--algo", "rec", "--sizes", "2", "--repeats", "1"]);
    assert!(rows[0]["comparisons"].as_u64().unwrap() >= 1);
}

#[test]
fn bench_text_table() {
    let o = dcsort(&["bench", "--sizes", "10,20", "--repeats", "1"], "");
    assert!(o.status.success());
    // header plus 3 algorithms x 2 sizes
    assert_eq!(stdout(&o).lines().count(), 7);
}
