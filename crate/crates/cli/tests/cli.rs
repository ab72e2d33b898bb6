use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lpconst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpconst"))
        .args(args)
        .env_remove("LPCONST_CACHE")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn records(out: &Output) -> Vec<Value> {
    stdout(out)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

fn one(args: &[&str]) -> Value {
    let out = lpconst(args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut recs = records(&out);
    assert_eq!(recs.len(), 1);
    recs.remove(0)
}

fn num(v: &Value, path: &str) -> f64 {
    v.pointer(path)
        .and_then(Value::as_f64)
        .unwrap_or_else(|| panic!("no number at {path} in {v}"))
}

fn close(got: f64, want: f64, rel: f64) {
    assert!((got - want).abs() <= rel * want.abs(), "{got} vs {want}");
}

/// Everything before the metadata block, which always comes last.
fn without_metadata(line: &str) -> &str {
    &line[..line.find(",\"metadata\":").expect("metadata block")]
}

#[test]
fn constant_examples() {
    let r = one(&["constant", "--n", "2", "--p", "1", "--interval", "-1", "1"]);
    close(num(&r, "/outputs/cStar"), 4.0, 1e-12);
    close(num(&r, "/outputs/dStarStar"), 0.5, 1e-12);
    assert_eq!(r["schemaVersion"], 1);

    let r = one(&["constant", "--n", "1", "--p", "inf"]);
    close(num(&r, "/outputs/cCanonical"), 2.0, 1e-12);
    close(num(&r, "/outputs/cStar"), 2.0, 1e-12);
    assert_eq!(r["inputs"]["interval"], serde_json::json!([0.0, 1.0]));

    let r = one(&["constant", "--n", "2", "--p", "2"]);
    close(num(&r, "/outputs/cCanonical"), 12.0 * 5f64.sqrt(), 1e-12);
    assert_eq!(r["outputs"]["boundsSatisfied"], true);
    assert_eq!(r["outputs"]["closedForm"]["source"], "p2");
}

#[test]
fn extremal_examples() {
    let r = one(&["extremal", "--n", "3", "--p", "2", "--force-numeric"]);
    close(num(&r, "/outputs/canonicalPositiveRoots/0"), 0.6f64.sqrt(), 1e-6);
    assert_eq!(r["provenance"]["method"], "NumericOptimization");

    let r = one(&["extremal", "--n", "1", "--p", "0.5", "--interval", "2", "7"]);
    close(num(&r, "/outputs/roots/0"), 4.5, 1e-12);

    // regression value cross-checked against the grid-search oracle
    let r = one(&["extremal", "--n", "2", "--p", "0.75", "--interval", "-1", "1"]);
    let x = num(&r, "/outputs/canonicalPositiveRoots/0");
    assert!(x > 0.0 && x < 0.5);
    close(x, 0.460_290_059_751_997_6, 1e-8);
}

#[test]
fn bad_flags_exit_one() {
    for args in [
        &["constant", "--p", "2"][..],
        &["constant", "--n", "2", "--p", "-1"],
        &["constant", "--n", "2", "--p", "abc"],
        &["constant", "--n", "0", "--p", "2"],
        &["constant", "--n", "2", "--p", "2", "--interval", "1", "0"],
        &["--tol", "0.5", "constant", "--n", "2", "--p", "2"],
        &["verify", "--suite", "bogus"],
        &["frobnicate"],
    ] {
        let out = lpconst(args);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    assert_eq!(code(&lpconst(&["--help"])), 0);
}

#[test]
fn non_convergence_exits_two_and_still_reports() {
    let out = lpconst(&[
        "extremal",
        "--n",
        "4",
        "--p",
        "0.01",
        "--interval",
        "-1",
        "1",
        "--max-evals",
        "1",
        "--restarts",
        "0",
    ]);
    assert_eq!(code(&out), 2);
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["provenance"]["converged"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn verify_suite_passes() {
    let r = one(&["verify", "--suite", "closed-forms", "--nmax", "3"]);
    assert_eq!(r["outputs"]["passed"], true);
    assert_eq!(r["outputs"]["failures"], serde_json::json!([]));
}

#[test]
fn output_is_deterministic_outside_metadata() {
    let args = ["sweep", "--n", "3", "--points", "5", "--force-numeric"];
    let (a, b) = (lpconst(&args), lpconst(&args));
    assert_eq!(code(&a), 0);
    let (a, b) = (stdout(&a), stdout(&b));
    assert_eq!(a.lines().count(), b.lines().count());
    for (x, y) in a.lines().zip(b.lines()) {
        assert_eq!(without_metadata(x), without_metadata(y));
    }
}

#[test]
fn infinity_literal_round_trips() {
    let r = one(&["constant", "--n", "3", "--p", "inf"]);
    assert_eq!(r["inputs"]["p"], "inf");
    let r = one(&["constant", "--n", "3", "--p", "2.5"]);
    assert_eq!(r["inputs"]["p"], "2.5");
}

#[test]
fn json_numbers_round_trip() {
    let out = lpconst(&["constant", "--n", "3", "--p", "1.7"]);
    let line = stdout(&out);
    let v: Value = serde_json::from_str(line.trim()).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
    let c = num(&v, "/outputs/cCanonical");
    assert!(line.contains(&format!("\"cCanonical\":{}", serde_json::to_string(&c).unwrap())));
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, f64)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(
                    &if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    },
                    x,
                    out,
                );
            }
        }
        Value::Array(xs) if xs.iter().all(Value::is_number) => {
            for (i, x) in xs.iter().enumerate() {
                out.push((format!("{prefix}[{i}]"), x.as_f64().unwrap()));
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        Value::Number(n) => out.push((prefix.to_string(), n.as_f64().unwrap())),
        _ => {}
    }
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let args = ["extremal", "--n", "5", "--p", "3", "--interval", "0", "2"];
    let json = one(&args);
    let mut with_csv = args.to_vec();
    with_csv.extend(["--format", "csv"]);
    let out = lpconst(&with_csv);
    assert_eq!(code(&out), 0);
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header = rdr.headers().unwrap().clone();
    let row = rdr.records().next().unwrap().unwrap();
    let cell = |name: &str| -> &str {
        let i = header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name}"));
        &row[i]
    };
    let mut nums = Vec::new();
    flatten("", &json, &mut nums);
    let mut compared = 0;
    for (path, x) in nums {
        if path.starts_with("metadata") {
            continue;
        }
        let got: f64 = match path.split_once('[') {
            Some((col, idx)) => {
                let idx: usize = idx.trim_end_matches(']').parse().unwrap();
                cell(col).split(';').nth(idx).unwrap().parse().unwrap()
            }
            None => cell(&path).parse().unwrap(),
        };
        assert_eq!(got.to_bits(), x.to_bits(), "{path}");
        compared += 1;
    }
    assert!(compared > 15);
}

#[test]
fn human_format_uses_six_digits() {
    let out = lpconst(&["constant", "--n", "2", "--p", "2", "--format", "human"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("constant n=2 p=2 on [0, 1]"));
    assert!(text.contains("cCanonical: 26.8328\n"), "{text}");
}

#[test]
fn out_and_quiet() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let out = lpconst(&["constant", "--n", "2", "--p", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(fs::read_to_string(&path).unwrap().trim()).unwrap();
    close(num(&v, "/outputs/cCanonical"), 32.0, 1e-12);

    let out = lpconst(&["--quiet", "constant", "--n", "2", "--p", "1"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
}

fn line_count(p: &Path) -> usize {
    fs::read_to_string(p).map(|s| s.lines().count()).unwrap_or(0)
}

#[test]
fn resume_reuses_cached_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let cache_arg = cache.to_str().unwrap();
    let base = [
        "--cache",
        cache_arg,
        "sweep",
        "--n",
        "4",
        "--points",
        "6",
        "--force-numeric",
        "--resume",
    ];

    let first = lpconst(&base);
    assert_eq!(code(&first), 0);
    let after_first = line_count(&cache);
    let rows = records(&first).len() - 1;
    assert!(after_first >= rows);

    let second = lpconst(&base);
    assert_eq!(code(&second), 0);
    let added = line_count(&cache) - after_first;
    assert!(added < rows, "resume recomputed rows: {added} new lines");
    for (x, y) in stdout(&first).lines().zip(stdout(&second).lines()) {
        let (x, y): (Value, Value) = (serde_json::from_str(x).unwrap(), serde_json::from_str(y).unwrap());
        assert_eq!(x["inputs"], y["inputs"]);
        assert_eq!(x["outputs"], y["outputs"]);
    }

    // the environment variable names the same cache
    let via_env = Command::new(env!("CARGO_BIN_EXE_lpconst"))
        .args(["constant", "--n", "2", "--p", "3"])
        .env("LPCONST_CACHE", &cache)
        .output()
        .unwrap();
    assert_eq!(code(&via_env), 0);
    let last = fs::read_to_string(&cache).unwrap().lines().last().unwrap().to_string();
    assert!(last.contains("\"command\":\"constant\""));
}

#[test]
fn torn_cache_lines_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    fs::write(&cache, "{\"schemaVersion\":1,\"comm\n").unwrap();
    let out = lpconst(&["--cache", cache.to_str().unwrap(), "constant", "--n", "1", "--p", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(line_count(&cache), 2);
}

#[test]
fn limit_table_rows_and_summary() {
    let out = lpconst(&["limit-table", "--p", "1", "--nmax", "6"]);
    assert_eq!(code(&out), 0);
    let recs = records(&out);
    assert_eq!(recs.len(), 7);
    for r in &recs[..6] {
        close(num(r, "/outputs/ratio"), 1.0, 1e-12);
        assert_eq!(r["provenance"]["method"], "ClosedForm");
    }
    let summary = &recs[6];
    assert_eq!(summary["outputs"]["differences"].as_array().unwrap().len(), 5);
}

#[test]
fn sweep_reports_increasing_roots() {
    let out = lpconst(&["sweep", "--n", "5", "--points", "7", "--force-numeric"]);
    assert_eq!(code(&out), 0);
    let recs = records(&out);
    let summary = recs.last().unwrap();
    let verdicts = summary["outputs"]["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 2);
    assert!(verdicts.iter().all(|v| v["verdict"] == "increasing"));
    let axis = summary["outputs"]["axis"].as_array().unwrap();
    assert_eq!(axis.last().unwrap(), "inf");
    assert!(axis.contains(&Value::from("1")) && axis.contains(&Value::from("2")));
}
