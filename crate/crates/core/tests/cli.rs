use std::path::{Path, PathBuf};
use std::process::Command;

use exactsearch::cli::{write_corpus, CorpusLine, DecodeLine};
use exactsearch::fixtures::m1_file;
use serde_json::Value;

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn m1(lines: &[(&str, &str, Option<&str>)]) -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("model.json"), m1_file().to_json()).unwrap();
        let corpus: Vec<CorpusLine> = lines
            .iter()
            .map(|(id, src, r)| CorpusLine { id: id.to_string(), source: src.to_string(), reference: r.map(String::from) })
            .collect();
        write_corpus(&dir.path().join("corpus.jsonl"), &corpus).unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> (i32, String) {
        let out = Command::new(env!("CARGO_BIN_EXE_exactsearch"))
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap();
        (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
    }

    fn decode(&self, search: &str, out: &str) -> i32 {
        self.run(&["decode", "--model", "model.json", "--corpus", "corpus.jsonl", "--search", search, "--out", out]).0
    }
}

fn read_lines(path: &Path) -> Vec<DecodeLine> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn exact_decode_of_m1() {
    let ws = Workspace::m1(&[("1", "x y", Some("a"))]);
    assert_eq!(ws.decode("exact:2", "out.jsonl"), 0);
    let lines = read_lines(&ws.path("out.jsonl"));
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0].hypothesis.as_deref(), Some(&["</s>".to_string()][..]));
    assert!((lines[0].score.unwrap() - 0.4f64.ln()).abs() < 1e-9);
    assert!(lines[0].exact);
    let raw: Value = serde_json::from_str(std::fs::read_to_string(ws.path("out.jsonl")).unwrap().trim()).unwrap();
    for key in ["id", "search", "hypothesis", "score", "exact", "flags", "stats"] {
        assert!(raw.get(key).is_some(), "missing {key}");
    }
    assert!(raw["stats"].get("wall_time").is_none());
}

#[test]
fn every_search_spec_decodes_m1() {
    let ws = Workspace::m1(&[("1", "x y z w", Some("a a")), ("2", "q", Some("a"))]);
    let expect: &[(&str, &[&str])] = &[
        ("greedy", &["a", "</s>"]),
        ("beam:2", &["</s>"]),
        ("exact", &["</s>"]),
        ("exact-minlen:0.25", &["a", "</s>"]),
        ("exact-fixedlen:ref", &["a", "a", "</s>"]),
        ("exact-fixedlen:2", &["a", "a", "</s>"]),
        ("exact-lennorm", &["a", "</s>"]),
        ("brute:3", &["</s>"]),
    ];
    for (spec, tokens) in expect {
        assert_eq!(ws.decode(spec, "out.jsonl"), 0, "{spec}");
        let first = &read_lines(&ws.path("out.jsonl"))[0];
        let want: Vec<String> = tokens.iter().map(|t| t.to_string()).collect();
        assert_eq!(first.hypothesis.as_ref(), Some(&want), "{spec}");
    }
}

#[test]
fn usage_errors_exit_with_one() {
    let ws = Workspace::m1(&[("1", "x", None)]);
    assert_eq!(ws.decode("beam:0", "out.jsonl"), 1);
    assert_eq!(ws.decode("sample", "out.jsonl"), 1);
    let (code, _) = ws.run(&["decode", "--model", "model.json", "--corpus", "corpus.jsonl", "--search", "greedy", "--out", "o", "--bogus"]);
    assert_eq!(code, 1);
    let (code, _) = ws.run(&["sweep", "--model", "model.json", "--corpus", "corpus.jsonl", "--beam-sizes", "", "--out", "s.csv"]);
    assert_eq!(code, 1);
}

#[test]
fn data_errors_exit_with_two() {
    let ws = Workspace::m1(&[("1", "x", None)]);
    std::fs::write(ws.path("bad.json"), r#"{"type": "tabular", "target_vocab": ["</s>", "a"], "contexts": {"": {"a": 0.7, "</s>": 0.4}}, "default": {"a": 0.5, "</s>": 0.5}}"#).unwrap();
    let (code, err) = ws.run(&["decode", "--model", "bad.json", "--corpus", "corpus.jsonl", "--search", "greedy", "--out", "o"]);
    assert_eq!(code, 2);
    assert!(err.contains("sum"), "{err}");
    let (code, _) = ws.run(&["decode", "--model", "missing.json", "--corpus", "corpus.jsonl", "--search", "greedy", "--out", "o"]);
    assert_eq!(code, 2);
}

#[test]
fn missing_reference_is_recorded_in_line() {
    let ws = Workspace::m1(&[("1", "x", Some("a")), ("2", "y", None), ("3", "z", Some("a a"))]);
    assert_eq!(ws.decode("exact-fixedlen:ref", "out.jsonl"), 0);
    let lines = read_lines(&ws.path("out.jsonl"));
    let ids: Vec<&str> = lines.iter().map(|l| l.id.as_str()).collect();
    assert_eq!(ids, ["1", "2", "3"]);
    assert!(lines[0].error.is_none());
    assert!(lines[1].error.as_deref().unwrap().contains("reference"));
    assert!(lines[1].hypothesis.is_none());
    assert!(lines[2].error.is_none());
}

#[test]
fn analyze_reports_greedy_search_error() {
    let ws = Workspace::m1(&[("1", "x", Some("a"))]);
    assert_eq!(ws.decode("greedy", "greedy.jsonl"), 0);
    assert_eq!(ws.decode("exact", "exact.jsonl"), 0);
    let (code, err) = ws.run(&[
        "analyze", "--corpus", "corpus.jsonl", "--decoded", "greedy.jsonl", "exact.jsonl",
        "--labels", "greedy,exact", "--out", "report.json",
    ]);
    assert_eq!(code, 0, "{err}");
    let report: Value = serde_json::from_str(&std::fs::read_to_string(ws.path("report.json")).unwrap()).unwrap();
    assert_eq!(report["reference_label"], "exact");
    assert_eq!(report["runs"][0]["search_error_pct"], 100.0);
    assert_eq!(report["runs"][1]["search_error_pct"], 0.0);
    assert_eq!(report["runs"][1]["empty_pct"], 100.0);
    let csv = std::fs::read_to_string(ws.path("report.exact.source.csv")).unwrap();
    assert!(csv.starts_with("bucket_low,bucket_high,count\n0,0.1,1\n"));
    assert!(ws.path("report.greedy.reference.csv").exists());
}

#[test]
fn exact_against_itself_has_no_errors() {
    let ws = Workspace::m1(&[("1", "x", Some("a")), ("2", "y z", Some("a"))]);
    assert_eq!(ws.decode("exact", "exact.jsonl"), 0);
    let (code, _) = ws.run(&["analyze", "--corpus", "corpus.jsonl", "--decoded", "exact.jsonl", "--labels", "exact", "--out", "r.json"]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(ws.path("r.json")).unwrap()).unwrap();
    assert_eq!(report["runs"][0]["search_error_pct"], 0.0);
}

#[test]
fn analyze_rejects_mismatched_ids() {
    let ws = Workspace::m1(&[("1", "x", Some("a"))]);
    assert_eq!(ws.decode("exact", "exact.jsonl"), 0);
    let other = Workspace::m1(&[("9", "x", Some("a"))]);
    std::fs::copy(ws.path("exact.jsonl"), other.path("exact.jsonl")).unwrap();
    let (code, err) = other.run(&["analyze", "--corpus", "corpus.jsonl", "--decoded", "exact.jsonl", "--out", "r.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("ID_MISMATCH"), "{err}");
}

#[test]
fn sweep_rows_are_sorted_by_beam_size() {
    let ws = Workspace::m1(&[("1", "x", Some("a"))]);
    for sizes in ["1,2", "2,1"] {
        let (code, err) = ws.run(&["sweep", "--model", "model.json", "--corpus", "corpus.jsonl", "--beam-sizes", sizes, "--out", "sweep.csv"]);
        assert_eq!(code, 0, "{err}");
        let csv = std::fs::read_to_string(ws.path("sweep.csv")).unwrap();
        let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0][0], rows[0][1]), ("1", "100"));
        assert_eq!((rows[1][0], rows[1][1]), ("2", "0"));
        assert!(csv.starts_with("n,search_error_pct,length_ratio_source,length_ratio_reference,bleu,mean_expansions\n"));
    }
}
