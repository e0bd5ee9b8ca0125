mod common;

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::process::Stdio;

use common::*;
use serde_json::Value;

fn json(path: &std::path::Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn analyze_records(f: &Fixture, out: &std::path::Path, extra: &[&str]) -> std::process::Output {
    let mut args = vec![
        "analyze",
        "--records",
        path_str(&f.csv),
        "--map",
        path_str(&f.map),
        "--thresholds",
        path_str(&f.thresholds),
        "--out",
        path_str(out),
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn binarize_hand_fixture() {
    let dir = tempfile::tempdir().unwrap();
    // two positives: each cut sits at the third largest value
    let rows = [
        ("p1", [5.0, 1.0, 9.0], true),
        ("p2", [4.0, 6.0, 8.0], false),
        ("p3", [3.0, 5.0, 1.0], true),
        ("p4", [2.0, 2.0, 7.0], false),
        ("p5", [1.0, 4.0, 2.0], false),
        ("p6", [6.0, 3.0, 3.0], false),
    ]
    .map(|(id, v, c)| (id.to_string(), v.to_vec(), c));
    let f = write_table(dir.path(), "six", 3, &rows);
    let out = dir.path().join("out");
    let o = run(&[
        "binarize",
        "--records",
        path_str(&f.csv),
        "--map",
        path_str(&f.map),
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("6 records, 2 positive, 5 patterns, 2^11 empty criteria"),
        "{}",
        stdout(&o)
    );

    let cuts = json(&out.join("thresholds.json"));
    assert_eq!(cuts["cuts"], serde_json::json!({"a": 4.0, "b": 4.0, "c": 7.0}));
    let patterns = json(&out.join("patterns.json"));
    assert_eq!(patterns["format"], "lad-patterns");
    let mut got: Vec<(String, Vec<String>)> = patterns["patterns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| {
            let ids = p["record_ids"]
                .as_array()
                .unwrap()
                .iter()
                .map(|i| i.as_str().unwrap().to_string())
                .collect();
            (p["bits"].as_str().unwrap().to_string(), ids)
        })
        .collect();
    got.sort();
    let want: Vec<(String, Vec<String>)> = [
        ("0000", vec!["p4", "p5"]),
        ("0101", vec!["p3"]),
        ("0110", vec!["p2"]),
        ("1000", vec!["p6"]),
        ("1011", vec!["p1"]),
    ]
    .iter()
    .map(|(k, ids)| (k.to_string(), ids.iter().map(|s| s.to_string()).collect()))
    .collect();
    assert_eq!(got, want);
    assert_eq!(json(&out.join("deviations.json"))["deviations"], serde_json::json!([]));
}

#[test]
fn input_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![
        ("r1".to_string(), vec![1.0], true),
        ("r1".to_string(), vec![2.0], false),
    ];
    let f = write_table(dir.path(), "dup", 1, &rows);
    let o = run(&[
        "binarize",
        "--records",
        path_str(&f.csv),
        "--map",
        path_str(&f.map),
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("duplicate record id 'r1'"), "{}", stderr(&o));

    let o = run(&["analyze", "--patterns", "/nonexistent/patterns.json"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["analyze"]);
    assert_eq!(o.status.code(), Some(3));
    let f = planted(dir.path(), false);
    let o = analyze_records(&f, dir.path(), &["--policy", "min_support=10", "--trace", "t.json"]);
    assert_eq!(o.status.code(), Some(3));
    let o = analyze_records(&f, dir.path(), &["--policy", "colour=red"]);
    assert_eq!(o.status.code(), Some(3));
    let o = analyze_records(&f, dir.path(), &["--precedence", "ABC"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn out_dir_defaults_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = planted(dir.path(), false);
    let out = dir.path().join("env-out");
    let o = lad()
        .env("LAD_OUT_DIR", &out)
        .args([
            "binarize",
            "--records",
            path_str(&f.csv),
            "--map",
            path_str(&f.map),
            "--thresholds",
        ])
        .arg(&f.thresholds)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("patterns.json").is_file());
}

#[test]
fn planted_rule_report_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let f = planted(dir.path(), false);
    let out = dir.path().join("a");
    let o = analyze_records(&f, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("200 records, 50 positive, 16 patterns, 2^16 empty criteria"));
    assert!(stdout(&o).contains(": 0 mismatches"), "{}", stdout(&o));
    let report = json(&out.join("report.json"));
    let pos: Vec<&Value> = report["rules"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["polarity"] == "positive")
        .collect();
    assert_eq!(pos.len(), 1);
    assert_eq!(pos[0]["factored"], "A (B + 1)");
    assert_eq!(report["thresholds"]["a"], 0.5);
    assert_eq!(report["policy"]["relevance"]["min_support"], 20);
    let md = std::fs::read_to_string(out.join("report.md")).unwrap();
    assert!(md.contains("| pos | 50(50) | A (B + 1) | - |"), "{md}");
    assert!(out.join("trace.json").is_file());
}

#[test]
fn unreachable_support_gives_an_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let f = planted(dir.path(), false);
    let o = analyze_records(&f, dir.path(), &["--policy", "min_support=1000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["rules"], serde_json::json!([]));
    assert_eq!(report["notes"].as_array().unwrap().len(), 1);
}

#[test]
fn reports_are_deterministic_and_traces_replay() {
    let dir = tempfile::tempdir().unwrap();
    let f = planted(dir.path(), true);
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert!(analyze_records(&f, &a, &[]).status.success());
    let trace = a.join("trace.json");
    assert!(analyze_records(&f, &b, &["--trace", path_str(&trace)]).status.success());
    assert!(analyze_records(&f, &c, &["--trace", path_str(&trace)]).status.success());
    let read = |p: std::path::PathBuf| std::fs::read(p).unwrap();
    assert_eq!(read(b.join("report.json")), read(c.join("report.json")));
    assert_eq!(read(a.join("trace.json")), read(b.join("trace.json")));
    // a replay differs from its policy run only in the recorded policy
    let (mut pa, pb) = (json(&a.join("report.json")), json(&b.join("report.json")));
    pa.as_object_mut().unwrap().remove("policy");
    assert_eq!(pa, pb);
    assert_eq!(pb["summary"]["excised"][0]["record_id"], "x1");
}

#[test]
fn patterns_input_matches_records_input() {
    let dir = tempfile::tempdir().unwrap();
    let f = planted(dir.path(), false);
    let bin = dir.path().join("bin");
    let o = run(&[
        "binarize",
        "--records",
        path_str(&f.csv),
        "--map",
        path_str(&f.map),
        "--thresholds",
        path_str(&f.thresholds),
        "--out",
        path_str(&bin),
    ]);
    assert!(o.status.success());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(analyze_records(&f, &a, &[]).status.success());
    let o = run(&[
        "analyze",
        "--patterns",
        path_str(&bin.join("patterns.json")),
        "--thresholds",
        path_str(&bin.join("thresholds.json")),
        "--out",
        path_str(&b),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        std::fs::read(a.join("report.json")).unwrap(),
        std::fs::read(b.join("report.json")).unwrap()
    );
}

#[test]
fn bad_trace_names_cycle_and_phase() {
    let dir = tempfile::tempdir().unwrap();
    let f = planted(dir.path(), false);
    let trace = dir.path().join("bad.json");
    std::fs::write(
        &trace,
        r#"{"format": "lad-trace", "version": 1, "cycles": [{"cycle": 1, "insight_rounds": [["C + D"]]}]}"#,
    )
    .unwrap();
    let o = analyze_records(&f, dir.path(), &["--trace", path_str(&trace)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cycle 1, insight phase"), "{}", stderr(&o));
    std::fs::write(&trace, r#"{"format": "lad-trace", "version": 9, "cycles": []}"#).unwrap();
    let o = analyze_records(&f, dir.path(), &["--trace", path_str(&trace)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("schema version 9"), "{}", stderr(&o));
}

#[test]
fn verify_and_rerender() {
    let dir = tempfile::tempdir().unwrap();
    let f = planted(dir.path(), true);
    assert!(analyze_records(&f, dir.path(), &[]).status.success());
    let report = dir.path().join("report.json");
    let verify = |r: &std::path::Path| {
        run(&[
            "verify",
            "--report",
            path_str(r),
            "--records",
            path_str(&f.csv),
            "--map",
            path_str(&f.map),
        ])
    };
    let o = verify(&report);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));

    let md = run(&["report", path_str(&report)]);
    assert_eq!(
        stdout(&md),
        std::fs::read_to_string(dir.path().join("report.md")).unwrap()
    );
    let js = run(&["report", path_str(&report), "--format", "json"]);
    assert_eq!(stdout(&js), std::fs::read_to_string(&report).unwrap());

    let mut doc = json(&report);
    let support = doc["rules"][1]["support"].as_u64().unwrap();
    doc["rules"][1]["support"] = (support + 3).into();
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, doc.to_string()).unwrap();
    let o = verify(&tampered);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stdout(&o).contains(&format!("R2 support: reported {}, recomputed {support}", support + 3)),
        "{}",
        stdout(&o)
    );

    doc["version"] = 2.into();
    std::fs::write(&tampered, doc.to_string()).unwrap();
    let o = run(&["report", path_str(&tampered)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(
        stderr(&o).contains("unsupported lad-report schema version 2"),
        "{}",
        stderr(&o)
    );
}

fn http_get(addr: &str, path: &str) -> String {
    let mut s = TcpStream::connect(addr).unwrap();
    write!(s, "GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut body = String::new();
    s.read_to_string(&mut body).unwrap();
    body
}

#[test]
fn serve_answers_health_in_api_only_mode() {
    let dir = tempfile::tempdir().unwrap();
    let f = planted(dir.path(), false);
    let mut child = lad()
        .args([
            "serve",
            "--records",
            path_str(&f.csv),
            "--map",
            path_str(&f.map),
            "--thresholds",
        ])
        .arg(&f.thresholds)
        .args(["--port", "0", "--ui"])
        .arg(dir.path().join("no-ui"))
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut lines = BufReader::new(child.stdout.take().unwrap()).lines();
    let mut notice = false;
    let addr = loop {
        let line = lines.next().expect("server output").unwrap();
        notice |= line.contains("serving the API only");
        if let Some(a) = line.strip_prefix("listening on http://") {
            break a.to_string();
        }
    };
    assert!(notice);
    let health = http_get(&addr, "/health");
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(health.starts_with("HTTP/1.1 200"), "{health}");
    assert!(health.contains(r#""variables":"ABCDs""#), "{health}");
    assert!(health.contains(r#""ui":false"#));
}

#[test]
fn serve_on_a_busy_port_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let f = planted(dir.path(), false);
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let o = run(&[
        "serve",
        "--records",
        path_str(&f.csv),
        "--map",
        path_str(&f.map),
        "--thresholds",
        path_str(&f.thresholds),
        "--port",
        &port,
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cannot listen"), "{}", stderr(&o));
}

#[test]
fn cohort_trace_fixture_reads() {
    use lad_core::boolring::{parse_poly, VariableTable};
    let text =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/sepsis_trace.json")).unwrap();
    let trace = lad_core::workflow::DecisionTrace::from_json(&text).unwrap();
    let codes: Vec<(String, char)> = "EFGLMyPxT".chars().map(|c| (c.to_string(), c)).collect();
    let feats: Vec<(&str, char)> = codes.iter().map(|(n, c)| (n.as_str(), *c)).collect();
    let table = VariableTable::from_codes(&feats, ("sepsis", 's')).unwrap();
    let polys: Vec<_> = trace.cycles.iter().flat_map(|c| c.insight_rounds.concat()).collect();
    assert_eq!(polys.len(), 5);
    for p in &polys {
        assert!(parse_poly(p, &table).unwrap().contains_var(table.class_index()), "{p}");
    }
    let excised: Vec<Vec<String>> = trace
        .cycles
        .iter()
        .flat_map(|c| c.exceptions.iter().map(|e| e.record_ids.clone()))
        .collect();
    assert_eq!(excised, [vec!["2237".to_string()], vec!["127".into(), "545".into()]]);
}
