//! End-to-end tests of the `quadef` binary: exit codes, error classes,
//! JSON round trips, determinism and golden report output.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the files under `tests/golden/`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quadef::cli::{ReportJson, SCHEMA_VERSION};
use quadef::corpus::{self, Expectation};
use quadef::defcomplex::deformation_report;
use quadef::document::Document;

fn quadef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadef")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 stderr")
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("quadef-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

/// Emits a corpus entry through the binary and stores it.
fn emit(s: &Scratch, name: &str) -> String {
    let o = quadef(&["corpus", "--emit", name]);
    assert_eq!(o.status.code(), Some(0), "emit {name}");
    s.write(&format!("{name}.txt"), &stdout(&o))
}

#[test]
fn corpus_lists_every_entry() {
    let o = quadef(&["corpus", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let names: Vec<&str> = out.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert!(names.len() >= 8);
    assert_eq!(names, corpus::entries().iter().map(|e| e.name).collect::<Vec<_>>());
}

#[test]
fn corpus_emit_is_verbatim() {
    for e in corpus::entries() {
        assert_eq!(stdout(&quadef(&["corpus", "--emit", e.name])), e.text);
    }
}

#[test]
fn unknown_corpus_name() {
    let o = quadef(&["corpus", "--emit", "no-such-entry"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[UnknownName]"));
}

#[test]
fn valid_entries_check_and_report() {
    let s = Scratch::new("valid");
    for e in corpus::entries() {
        let Expectation::Valid { h } = e.expect else { continue };
        let path = emit(&s, e.name);
        let c = quadef(&["check", &path]);
        assert_eq!(c.status.code(), Some(0), "{}: {}", e.name, stderr(&c));
        assert!(stdout(&c).ends_with("check: ok\n"), "{}", e.name);

        let r = quadef(&["report", &path, "--json"]);
        assert_eq!(r.status.code(), Some(0), "{}", e.name);
        let parsed: ReportJson = serde_json::from_str(&stdout(&r)).unwrap();
        assert_eq!(parsed.schema_version, SCHEMA_VERSION);
        assert_eq!((parsed.report.h0, parsed.report.h1, parsed.report.h2), h, "{}", e.name);
    }
}

#[test]
fn invalid_entries_exit_codes() {
    let s = Scratch::new("invalid");
    for e in corpus::entries() {
        let Expectation::Invalid { command, kind, exit } = e.expect else { continue };
        let path = emit(&s, e.name);
        let o = quadef(&[command, &path]);
        assert_eq!(o.status.code(), Some(exit), "{}", e.name);
        assert!(stderr(&o).starts_with(&format!("error[{kind}]")), "{}: {}", e.name, stderr(&o));
    }
}

#[test]
fn json_matches_library() {
    let s = Scratch::new("json");
    let path = emit(&s, "ideal-point-p2");
    let from_cli: ReportJson = serde_json::from_str(&stdout(&quadef(&["report", &path, "--json"]))).unwrap();
    let q = Document::parse(corpus::get("ideal-point-p2").unwrap().text).unwrap().quadratic_sheaf().unwrap();
    assert_eq!(from_cli.report, deformation_report(&q, None).unwrap());
    // the schema survives a second serialize/parse cycle
    let again = serde_json::to_string_pretty(&from_cli).unwrap();
    let reparsed: ReportJson = serde_json::from_str(&again).unwrap();
    assert_eq!(reparsed, from_cli);
}

#[test]
fn output_is_deterministic() {
    let s = Scratch::new("determinism");
    let path = emit(&s, "symplectic-split-p1-resolved");
    for args in [vec!["report", &path], vec!["report", &path, "--json"], vec!["realize", &path, "--json"]] {
        let a = quadef(&args);
        let b = quadef(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), Some(0));
    }
}

#[test]
fn explicit_window_flag() {
    let s = Scratch::new("window");
    let path = emit(&s, "symplectic-split-p2");
    let base: ReportJson = serde_json::from_str(&stdout(&quadef(&["report", &path, "--json"]))).unwrap();
    let wide = quadef(&["report", &path, "--json", "--window", "9"]);
    assert_eq!(wide.status.code(), Some(0));
    let wide: ReportJson = serde_json::from_str(&stdout(&wide)).unwrap();
    assert_eq!(wide.report.cohomology.window_used, 9);
    assert_eq!(wide.report.cohomology.dims, base.report.cohomology.dims);

    let narrow = quadef(&["report", &path, "--window", "1"]);
    assert_eq!(narrow.status.code(), Some(3));
    assert!(stderr(&narrow).starts_with("error[Unstable]"));
}

#[test]
fn realize_then_check_roundtrip() {
    let s = Scratch::new("realize");
    let path = emit(&s, "symplectic-split-p1-resolved");
    let out = s.path("realized.txt");
    let r = quadef(&["realize", &path, "--out", &out]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    assert_eq!(stdout(&r), format!("wrote {out}\n"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("[extension]") && text.contains("[presentation]"));

    let c = quadef(&["check", &out]);
    assert_eq!(c.status.code(), Some(0), "{}", stderr(&c));
    let log = stdout(&c);
    assert!(log.contains("presentation"), "{log}");
    assert!(log.ends_with("check: ok\n"));

    let json: serde_json::Value = serde_json::from_str(&stdout(&quadef(&["realize", &path, "--json"]))).unwrap();
    assert_eq!(json["split"], false);
    assert!(json["checks"].as_array().unwrap().iter().all(|c| c["holds"] == true));
}

#[test]
fn tampered_presentation_is_rejected() {
    let s = Scratch::new("tamper");
    let path = emit(&s, "symplectic-split-p1-resolved");
    let out = s.path("realized.txt");
    assert_eq!(quadef(&["realize", &path, "--out", &out]).status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let start = text.find("[extension]").unwrap();
    let psi = start + text[start..].find("psi =").unwrap();
    // flip the sign of the first nonzero psi entry that reads "-1"
    let at = psi + text[psi..].find("-1").unwrap();
    let tampered = format!("{} 1{}", &text[..at], &text[at + 2..]);
    let bad = s.write("tampered.txt", &tampered);
    let c = quadef(&["check", &bad]);
    assert_eq!(c.status.code(), Some(2), "{}", stdout(&c));
    assert!(stdout(&c).contains("check: failed"));
}

#[test]
fn realize_class_out_of_range() {
    let s = Scratch::new("range");
    let path = emit(&s, "symplectic-split-p1-resolved");
    let o = quadef(&["realize", &path, "--class", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[IndexOutOfRange]"));

    let plain = emit(&s, "symplectic-split-p1");
    let o = quadef(&["realize", &plain]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[NotGloballyRepresentable]"));
}

#[test]
fn parse_error_carries_position() {
    let s = Scratch::new("position");
    let path = emit(&s, "invalid-parse");
    let o = quadef(&["check", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 15, column 8"), "{}", stderr(&o));
}

#[test]
fn missing_file_is_io_error() {
    let o = quadef(&["check", "/nonexistent/quadef/input.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[IoError]"));
}

#[test]
fn help_and_usage() {
    let h = quadef(&["--help"]);
    assert_eq!(h.status.code(), Some(0));
    for cmd in ["check", "report", "realize", "corpus"] {
        assert!(stdout(&h).contains(cmd));
    }
    assert_eq!(quadef(&["--version"]).status.code(), Some(0));
    assert_eq!(quadef(&[]).status.code(), Some(1));
    assert_eq!(quadef(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(quadef(&["corpus", "--list", "--emit", "x"]).status.code(), Some(1));
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing {}; rerun with UPDATE_GOLDEN=1", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

#[test]
fn golden_reports() {
    let s = Scratch::new("golden");
    for name in ["hyperbolic-p1", "symplectic-split-p1-resolved", "ideal-point-p2"] {
        let path = emit(&s, name);
        let o = quadef(&["report", &path]);
        assert_eq!(o.status.code(), Some(0));
        golden(&format!("{name}.report.txt"), &stdout(&o));
    }
    let path = emit(&s, "symplectic-split-p1-resolved");
    golden("symplectic-split-p1-resolved.realize.json", &stdout(&quadef(&["realize", &path, "--json"])));
}
