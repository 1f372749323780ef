//! Command implementations behind the `quadef` binary. Each command returns
//! an [`Outcome`] instead of printing, so tests can run them in-process.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::corpus;
use crate::defcomplex::{check_nondegenerate, check_symmetry, deformation_report, DeformationReport, QuadraticSheaf};
use crate::document::Document;
use crate::error::{Error, Result};
use crate::freecomplex::PolyMatrix;
use crate::realizer::{realize_class, realize_first_order, FirstOrderDeformation, IdentityCheck};

/// Version of every JSON document the CLI emits.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "quadef", version, about = "Deformations of orthogonal and symplectic sheaves on projective space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a document: complex, symmetry, descent, nondegeneracy, and the
    /// extension identities when an [extension] section is present.
    Check { file: PathBuf },
    /// Compute H^0, H^1, H^2 of the deformation complex.
    Report(ReportArgs),
    /// Realize a class of H^1 as an explicit first-order deformation.
    Realize(RealizeArgs),
    /// List or print the built-in examples.
    Corpus(CorpusArgs),
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub file: PathBuf,
    /// Cech window; overrides the document's `window`.
    #[arg(long)]
    pub window: Option<u32>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    pub file: PathBuf,
    /// Index into the basis of H^1.
    #[arg(long, default_value_t = 0)]
    pub class: usize,
    #[arg(long)]
    pub window: Option<u32>,
    /// Write the resulting document here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct CorpusArgs {
    #[arg(long)]
    pub list: bool,
    #[arg(long, value_name = "NAME")]
    pub emit: Option<String>,
}

/// What a command printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, stderr: String::new(), code: 0 }
    }

    fn fail(stdout: String, e: &Error) -> Self {
        Outcome { stdout, stderr: format!("error[{}]: {e}\n", e.kind()), code: e.exit_code() }
    }
}

/// The JSON form of `report`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub schema_version: u32,
    pub report: DeformationReport,
}

/// The JSON form of `realize`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizeJson {
    pub schema_version: u32,
    pub class: usize,
    pub eta: Vec<Vec<String>>,
    pub psi: Vec<Vec<String>>,
    /// Twists of the generators of F.
    pub generators: Vec<i32>,
    pub relation_twists: Vec<i32>,
    pub relations: Vec<Vec<String>>,
    pub i: Vec<Vec<String>>,
    pub j: Vec<Vec<String>>,
    pub phi: Vec<Vec<String>>,
    pub checks: Vec<IdentityCheck>,
    pub split: bool,
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Check { file } => cmd_check(file),
        Command::Report(a) => cmd_report(&a.file, a.window, a.json),
        Command::Realize(a) => cmd_realize(&a.file, a.class, a.window, a.out.as_deref(), a.json),
        Command::Corpus(a) => cmd_corpus(a.list, a.emit.as_deref()),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(Document, QuadraticSheaf)> {
    let doc = Document::parse(&read(path)?)?;
    let q = doc.quadratic_sheaf()?;
    Ok((doc, q))
}

/// Name of the validation stage an error belongs to.
fn stage(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } | Error::Io(_) | Error::UnknownName(_) => "parse",
        Error::DegreeMismatch(_) | Error::ShapeMismatch(_) => "shape",
        Error::NotAComplex { .. } => "complex",
        Error::SymmetryFailure { .. } => "symmetry",
        Error::DescentFailure(_) | Error::NoLift(_) => "descent",
        Error::Degenerate { .. } | Error::FiberRankDrop { .. } => "nondegeneracy",
        _ => "extension",
    }
}

fn write_checks(out: &mut String, checks: &[IdentityCheck]) {
    for c in checks {
        let _ = writeln!(out, "  {:<5} {}", if c.holds { "ok" } else { "FAIL" }, c.name);
    }
}

pub fn cmd_check(file: &Path) -> Outcome {
    let mut out = String::new();
    let result = (|| -> Result<()> {
        let (doc, q) = load(file)?;
        let w = &q.resolution;
        let ranks: Vec<String> = w.degrees().map(|i| w.rank(i).to_string()).collect();
        q.resolution.validate()?;
        let _ = writeln!(out, "complex        ok  (levels {}..0, ranks {})", w.min_degree(), ranks.join(" "));
        check_symmetry(&q)?;
        let _ = writeln!(out, "symmetry       ok  (sign {})", q.sign);
        let _ = writeln!(out, "descent        ok");
        let wit = check_nondegenerate(&q)?;
        let _ = writeln!(
            out,
            "nondegeneracy  ok  (point ({}), fiber rank {}, attempt {})",
            wit.point.join(" : "),
            wit.fiber_rank,
            wit.attempts
        );
        if let Some(c) = doc.cocycle(&q)? {
            let f = realize_first_order(&q, &c)?;
            let _ = writeln!(out, "extension      ok");
            write_checks(&mut out, &f.checks);
            let bad = doc.presentation_mismatches(&f)?;
            if !bad.is_empty() {
                return Err(Error::ShapeMismatch(format!(
                    "presentation differs from the realization of the extension in: {}",
                    bad.join(", ")
                )));
            }
            if doc.presentation.is_some() {
                let _ = writeln!(out, "presentation   ok  (matches the realization)");
            }
        }
        Ok(())
    })();
    match result {
        Ok(()) => {
            out.push_str("check: ok\n");
            Outcome::ok(out)
        }
        Err(e) => {
            let _ = writeln!(out, "check: failed at {}", stage(&e));
            Outcome::fail(out, &e)
        }
    }
}

pub fn render_report(r: &DeformationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "h0 = {}", r.h0);
    let _ = writeln!(s, "h1 = {}", r.h1);
    let _ = writeln!(s, "h2 = {}", r.h2);
    let c = &r.cohomology;
    let dims: Vec<String> = c.dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(s, "cohomology     degrees {}..{}: {}", c.min_degree, c.max_degree(), dims.join(" "));
    let _ = writeln!(s, "window         {} ({})", c.window_used, if c.stable { "stable" } else { "unstable" });
    let e = &r.euler;
    let _ = writeln!(
        s,
        "euler          chi = {}, chi(DW(x)W) = {}, chi((DW(x)DW)^s) = {} ({})",
        e.complex,
        e.source,
        e.target,
        if e.holds { "holds" } else { "FAILS" }
    );
    match r.cross_check {
        Some(d) => {
            let _ = writeln!(
                s,
                "cross-check    infinitesimal symmetries: {d} ({})",
                if r.cross_check_agrees { "agrees" } else { "DISAGREES" }
            );
        }
        None => s.push_str("cross-check    not computed\n"),
    }
    let _ = writeln!(
        s,
        "nondegenerate  at ({}), fiber rank {}",
        r.witness.point.join(" : "),
        r.witness.fiber_rank
    );
    if r.formally_smooth_hint {
        s.push_str("formally smooth hint: h2 = 0\n");
    }
    let _ = writeln!(
        s,
        "long exact sequence (window {}, {}):",
        r.les.window,
        if r.les.exact { "exact" } else { "NOT exact" }
    );
    s.push_str("  degree  deformation  DW(x)W  (DW(x)DW)^s\n");
    for row in &r.les.rows {
        let _ = writeln!(s, "  {:>6}  {:>11}  {:>6}  {:>11}", row.degree, row.cone, row.source, row.target);
    }
    for f in &r.les.failures {
        let _ = writeln!(s, "  failure: {f}");
    }
    s
}

pub fn report_json(r: &DeformationReport) -> String {
    let doc = ReportJson { schema_version: SCHEMA_VERSION, report: r.clone() };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

pub fn cmd_report(file: &Path, window: Option<u32>, json: bool) -> Outcome {
    let result = (|| -> Result<DeformationReport> {
        let (doc, q) = load(file)?;
        deformation_report(&q, window.or(doc.window))
    })();
    match result {
        Ok(r) => Outcome::ok(if json { report_json(&r) } else { render_report(&r) }),
        Err(e) => Outcome::fail(String::new(), &e),
    }
}

/// JSON rendering of a realized class, shared with the C interface.
pub fn realize_json(class: usize, c: &crate::realizer::Cocycle1, f: &FirstOrderDeformation) -> String {
    let doc = RealizeJson {
        schema_version: SCHEMA_VERSION,
        class,
        eta: c.eta.to_strings(),
        psi: c.psi.to_strings(),
        generators: f.generators().twists.clone(),
        relation_twists: f.presentation.term(-1).twists.clone(),
        relations: f.relations().to_strings(),
        i: f.inclusion_i.to_strings(),
        j: f.projection_j.to_strings(),
        phi: f.phi.to_strings(),
        checks: f.checks.clone(),
        split: f.splitting.is_some(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("realization serializes");
    s.push('\n');
    s
}

fn describe(m: &PolyMatrix) -> String {
    format!("[{}] -> [{}]", m.source(), m.target())
}

pub fn cmd_realize(file: &Path, class: usize, window: Option<u32>, out: Option<&Path>, json: bool) -> Outcome {
    let result = (|| -> Result<String> {
        let (doc, q) = load(file)?;
        q.validate()?;
        let (c, f) = realize_class(&q, class, window.or(doc.window))?;
        if json {
            return Ok(realize_json(class, &c, &f));
        }
        let mut rendered = Document::from_sheaf(&q, doc.window).with_extension(&c).with_presentation(&f);
        let mut comments = doc.comments.clone();
        comments.push(String::new());
        comments.push(format!("first-order deformation realizing class {class} of H^1"));
        comments.push(format!(
            "F = coker(relations : {}), underlying extension {}",
            describe(&f.relations()),
            if f.splitting.is_some() { "split" } else { "non-split" }
        ));
        comments.push("verified identities:".into());
        for ch in &f.checks {
            comments.push(format!("  {} {}", if ch.holds { "ok" } else { "FAIL" }, ch.name));
        }
        rendered.comments = comments;
        Ok(rendered.render())
    })();
    match result {
        Ok(text) => match out {
            None => Outcome::ok(text),
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => Outcome::ok(format!("wrote {}\n", path.display())),
                Err(e) => Outcome::fail(String::new(), &Error::Io(format!("{}: {e}", path.display()))),
            },
        },
        Err(e) => Outcome::fail(String::new(), &e),
    }
}

pub fn cmd_corpus(list: bool, emit: Option<&str>) -> Outcome {
    if list {
        let mut s = String::new();
        for e in corpus::entries() {
            let _ = writeln!(s, "{:<30} {}", e.name, e.description);
        }
        return Outcome::ok(s);
    }
    let name = emit.unwrap_or_default();
    match corpus::get(name) {
        Some(e) => Outcome::ok(e.text.to_string()),
        None => Outcome::fail(String::new(), &Error::UnknownName(format!("no corpus entry named '{name}'"))),
    }
}
