//! The line-oriented input format for quadratic sheaves.
//!
//! ```text
//! document  := line*
//! line      := blank | comment | header | setting | row
//! comment   := '#' any*                      (also allowed after content)
//! header    := '[' section ']'
//! section   := 'level' INT | 'pairing' | 'extension' | 'presentation'
//! setting   := KEY '=' value?                (an empty value opens a matrix)
//! row       := '|' entries? '|'
//! entries   := POLY (',' POLY)*
//! ```
//!
//! Keys before the first header: `ambient_dim` (required), `sign` (`+`, `-`
//! or `−`, required), `window` (optional). In `[level i]`: `twists` (comma
//! separated integers, possibly empty) and, for i < 0, `differential`, the
//! matrix of level i -> level i+1 (rows = rank of level i+1). `[pairing]`
//! holds the matrix rows directly. `[extension]` holds the matrices `eta`
//! (W_{-1} -> W0) and `psi` (on W0 (x) W0). `[presentation]` holds
//! `relations`, `i`, `j`, `phi` as written by `realize`; when present,
//! `check` recomputes them and compares.
//!
//! Variables are `x0 .. xn`. Lines and columns in errors are 1-based and count
//! characters.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::defcomplex::QuadraticSheaf;
use crate::error::{Error, Result};
use crate::freecomplex::{FreeSheaf, PolyMatrix, Sign, TwistedComplex};
use crate::polyring::Poly;
use crate::realizer::{Cocycle1, FirstOrderDeformation};

/// One matrix entry with its source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub text: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CellMatrix {
    pub rows: Vec<Vec<Cell>>,
    /// Line of the key or header that opened the matrix.
    pub line: usize,
}

impl CellMatrix {
    pub fn from_strings(rows: Vec<Vec<String>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|text| Cell { text, line: 0, column: 0 }).collect())
            .collect();
        CellMatrix { rows, line: 0 }
    }

    pub fn from_poly_matrix(m: &PolyMatrix) -> Self {
        Self::from_strings(m.to_strings())
    }

    pub fn texts(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.iter().map(|c| c.text.clone()).collect()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub degree: i32,
    pub twists: Vec<i32>,
    pub differential: Option<CellMatrix>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Extension {
    pub eta: Option<CellMatrix>,
    pub psi: Option<CellMatrix>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PresentationBlock {
    pub relations: Option<CellMatrix>,
    pub i: Option<CellMatrix>,
    pub j: Option<CellMatrix>,
    pub phi: Option<CellMatrix>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub ambient_dim: usize,
    pub sign: Sign,
    pub window: Option<u32>,
    /// Keyed by degree.
    pub levels: BTreeMap<i32, Level>,
    pub pairing: CellMatrix,
    pub extension: Option<Extension>,
    pub presentation: Option<PresentationBlock>,
    /// Leading comment lines, kept by `render`.
    pub comments: Vec<String>,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn col_of(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Level(i32),
    Pairing,
    Extension,
    Presentation,
}

/// Which matrix subsequent rows extend.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Target {
    None,
    Differential(i32),
    Pairing,
    Eta,
    Psi,
    Relations,
    I,
    J,
    Phi,
}

struct Raw {
    ambient_dim: Option<(usize, usize)>,
    sign: Option<Sign>,
    window: Option<u32>,
    levels: BTreeMap<i32, Level>,
    pairing: Option<CellMatrix>,
    extension: Option<Extension>,
    presentation: Option<PresentationBlock>,
    comments: Vec<String>,
}

impl Raw {
    fn matrix(&mut self, t: Target) -> &mut CellMatrix {
        match t {
            Target::Differential(d) => {
                self.levels.get_mut(&d).expect("level exists").differential.get_or_insert_with(Default::default)
            }
            Target::Pairing => self.pairing.get_or_insert_with(Default::default),
            Target::Eta => self.extension.as_mut().expect("section").eta.get_or_insert_with(Default::default),
            Target::Psi => self.extension.as_mut().expect("section").psi.get_or_insert_with(Default::default),
            Target::Relations => {
                self.presentation.as_mut().expect("section").relations.get_or_insert_with(Default::default)
            }
            Target::I => self.presentation.as_mut().expect("section").i.get_or_insert_with(Default::default),
            Target::J => self.presentation.as_mut().expect("section").j.get_or_insert_with(Default::default),
            Target::Phi => self.presentation.as_mut().expect("section").phi.get_or_insert_with(Default::default),
            Target::None => unreachable!("checked by caller"),
        }
    }

    fn exists(&self, t: Target) -> bool {
        match t {
            Target::Differential(d) => self.levels.get(&d).is_some_and(|l| l.differential.is_some()),
            Target::Pairing => self.pairing.is_some(),
            Target::Eta => self.extension.as_ref().is_some_and(|e| e.eta.is_some()),
            Target::Psi => self.extension.as_ref().is_some_and(|e| e.psi.is_some()),
            Target::Relations => self.presentation.as_ref().is_some_and(|p| p.relations.is_some()),
            Target::I => self.presentation.as_ref().is_some_and(|p| p.i.is_some()),
            Target::J => self.presentation.as_ref().is_some_and(|p| p.j.is_some()),
            Target::Phi => self.presentation.as_ref().is_some_and(|p| p.phi.is_some()),
            Target::None => false,
        }
    }
}

fn parse_sign(v: &str, line: usize, col: usize) -> Result<Sign> {
    match v {
        "+" => Ok(Sign::Plus),
        "-" | "\u{2212}" => Ok(Sign::Minus),
        _ => Err(parse_err(line, col, format!("sign must be '+' or '-', found '{v}'"))),
    }
}

fn parse_int<T: std::str::FromStr>(v: &str, line: usize, col: usize, what: &str) -> Result<T> {
    v.parse().map_err(|_| parse_err(line, col, format!("{what} must be an integer, found '{v}'")))
}

fn parse_twists(v: &str, line: usize, col: usize) -> Result<Vec<i32>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut off = 0;
    for part in v.split(',') {
        let lead = part.len() - part.trim_start().len();
        out.push(parse_int(part.trim(), line, col + v[..off + lead].chars().count(), "twist")?);
        off += part.len() + 1;
    }
    Ok(out)
}

fn parse_row(text: &str, body_start: usize, line: usize) -> Result<Vec<Cell>> {
    // text is the full line; the row sits between the first '|' and the last '|'
    let inner = &text[body_start + 1..];
    let Some(end) = inner.rfind('|') else {
        return Err(parse_err(line, col_of(text, text.len()), "matrix row must end with '|'"));
    };
    let inner = &inner[..end];
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut cells = Vec::new();
    let mut off = body_start + 1;
    for part in inner.split(',') {
        let lead = part.len() - part.trim_start().len();
        let t = part.trim();
        if t.is_empty() {
            return Err(parse_err(line, col_of(text, off + lead), "empty matrix entry"));
        }
        cells.push(Cell { text: t.to_string(), line, column: col_of(text, off + lead) });
        off += part.len() + 1;
    }
    Ok(cells)
}

impl Document {
    pub fn parse(input: &str) -> Result<Document> {
        let mut raw = Raw {
            ambient_dim: None,
            sign: None,
            window: None,
            levels: BTreeMap::new(),
            pairing: None,
            extension: None,
            presentation: None,
            comments: Vec::new(),
        };
        let mut section = Section::Top;
        let mut target = Target::None;
        let mut seen_content = false;
        let mut seen_keys: Vec<(String, Section)> = Vec::new();

        for (idx, full) in input.lines().enumerate() {
            let ln = idx + 1;
            let code_end = full.find('#').unwrap_or(full.len());
            if !seen_content && full.trim_start().starts_with('#') {
                raw.comments.push(full.trim_start()[1..].trim().to_string());
            }
            let code = &full[..code_end];
            let trimmed = code.trim();
            if trimmed.is_empty() {
                continue;
            }
            seen_content = true;
            let start = code.len() - code.trim_start().len();
            let scol = col_of(full, start);

            if trimmed.starts_with('|') {
                if target == Target::None {
                    return Err(parse_err(ln, scol, "matrix row outside a matrix block"));
                }
                let cells = parse_row(code.trim_end(), start, ln)?;
                let m = raw.matrix(target);
                if let Some(first) = m.rows.first() {
                    if first.len() != cells.len() {
                        return Err(parse_err(
                            ln,
                            scol,
                            format!("row has {} entries, previous rows have {}", cells.len(), first.len()),
                        ));
                    }
                }
                m.rows.push(cells);
                continue;
            }

            if trimmed.starts_with('[') {
                if !trimmed.ends_with(']') {
                    return Err(parse_err(ln, col_of(full, start + trimmed.len()), "section header must end with ']'"));
                }
                let name = trimmed[1..trimmed.len() - 1].trim();
                let mut words = name.split_whitespace();
                target = Target::None;
                section = match (words.next(), words.next(), words.next()) {
                    (Some("level"), Some(d), None) => {
                        let d: i32 = parse_int(d, ln, scol + 1, "level degree")?;
                        if d > 0 {
                            return Err(parse_err(ln, scol + 1, "resolution levels must have degree <= 0"));
                        }
                        if raw.levels.contains_key(&d) {
                            return Err(parse_err(ln, scol, format!("duplicate section [level {d}]")));
                        }
                        raw.levels.insert(d, Level { degree: d, twists: Vec::new(), differential: None, line: ln });
                        Section::Level(d)
                    }
                    (Some("pairing"), None, None) => {
                        if raw.pairing.is_some() {
                            return Err(parse_err(ln, scol, "duplicate section [pairing]"));
                        }
                        raw.pairing = Some(CellMatrix { rows: Vec::new(), line: ln });
                        target = Target::Pairing;
                        Section::Pairing
                    }
                    (Some("extension"), None, None) => {
                        if raw.extension.is_some() {
                            return Err(parse_err(ln, scol, "duplicate section [extension]"));
                        }
                        raw.extension = Some(Extension { line: ln, ..Default::default() });
                        Section::Extension
                    }
                    (Some("presentation"), None, None) => {
                        if raw.presentation.is_some() {
                            return Err(parse_err(ln, scol, "duplicate section [presentation]"));
                        }
                        raw.presentation = Some(PresentationBlock { line: ln, ..Default::default() });
                        Section::Presentation
                    }
                    _ => return Err(parse_err(ln, scol, format!("unknown section [{name}]"))),
                };
                continue;
            }

            let Some(eq) = code.find('=') else {
                return Err(parse_err(ln, scol, "expected 'key = value', a '[section]' header or a '|' matrix row"));
            };
            let key = code[..eq].trim();
            let vstart = eq + 1 + (code[eq + 1..].len() - code[eq + 1..].trim_start().len());
            let value = code[eq + 1..].trim();
            let vcol = col_of(full, vstart);
            if seen_keys.iter().any(|(k, s)| k == key && *s == section) {
                return Err(parse_err(ln, scol, format!("duplicate key '{key}'")));
            }
            seen_keys.push((key.to_string(), section));
            target = Target::None;
            let opens = |t: Target, raw: &Raw| -> Result<Target> {
                if !value.is_empty() {
                    return Err(parse_err(ln, vcol, format!("'{key} =' must be followed by matrix rows on later lines")));
                }
                debug_assert!(!raw.exists(t));
                Ok(t)
            };
            match (section, key) {
                (Section::Top, "ambient_dim") => {
                    let n: usize = parse_int(value, ln, vcol, "ambient_dim")?;
                    if n == 0 {
                        return Err(parse_err(ln, vcol, "ambient_dim must be at least 1"));
                    }
                    raw.ambient_dim = Some((n, ln));
                }
                (Section::Top, "sign") => raw.sign = Some(parse_sign(value, ln, vcol)?),
                (Section::Top, "window") => {
                    let w: u32 = parse_int(value, ln, vcol, "window")?;
                    if w == 0 {
                        return Err(parse_err(ln, vcol, "window must be positive"));
                    }
                    raw.window = Some(w);
                }
                (Section::Level(d), "twists") => {
                    raw.levels.get_mut(&d).expect("level exists").twists = parse_twists(value, ln, vcol)?;
                }
                (Section::Level(d), "differential") => {
                    if d == 0 {
                        return Err(parse_err(ln, scol, "level 0 has no differential"));
                    }
                    target = opens(Target::Differential(d), &raw)?;
                    let l = raw.levels.get_mut(&d).expect("level exists");
                    l.differential = Some(CellMatrix { rows: Vec::new(), line: ln });
                }
                (Section::Extension, "eta") => {
                    target = opens(Target::Eta, &raw)?;
                    raw.extension.as_mut().expect("section").eta = Some(CellMatrix { rows: Vec::new(), line: ln });
                }
                (Section::Extension, "psi") => {
                    target = opens(Target::Psi, &raw)?;
                    raw.extension.as_mut().expect("section").psi = Some(CellMatrix { rows: Vec::new(), line: ln });
                }
                (Section::Presentation, k @ ("relations" | "i" | "j" | "phi")) => {
                    let t = match k {
                        "relations" => Target::Relations,
                        "i" => Target::I,
                        "j" => Target::J,
                        _ => Target::Phi,
                    };
                    target = opens(t, &raw)?;
                    *raw.matrix(t) = CellMatrix { rows: Vec::new(), line: ln };
                }
                _ => return Err(parse_err(ln, scol, format!("unknown key '{key}' here"))),
            }
        }

        let end = input.lines().count().max(1);
        let Some((ambient_dim, _)) = raw.ambient_dim else {
            return Err(parse_err(end, 1, "missing 'ambient_dim'"));
        };
        let Some(sign) = raw.sign else { return Err(parse_err(end, 1, "missing 'sign'")) };
        let Some(pairing) = raw.pairing else { return Err(parse_err(end, 1, "missing [pairing] section")) };
        if !raw.levels.contains_key(&0) {
            return Err(parse_err(end, 1, "missing [level 0] section"));
        }
        let lo = *raw.levels.keys().next().expect("level 0 exists");
        for d in lo..=0 {
            if !raw.levels.contains_key(&d) {
                return Err(parse_err(raw.levels[&lo].line, 1, format!("levels must be contiguous; [level {d}] is missing")));
            }
        }
        Ok(Document {
            ambient_dim,
            sign,
            window: raw.window,
            levels: raw.levels,
            pairing,
            extension: raw.extension,
            presentation: raw.presentation,
            comments: raw.comments,
        })
    }

    pub fn nvars(&self) -> usize {
        self.ambient_dim + 1
    }

    fn sheaf(&self, d: i32) -> FreeSheaf {
        FreeSheaf::new(self.levels.get(&d).map(|l| l.twists.clone()).unwrap_or_default())
    }

    /// Parses the entries of a matrix block, checking its shape and degrees.
    fn poly_matrix(&self, m: &CellMatrix, source: &FreeSheaf, target: &FreeSheaf, what: &str) -> Result<PolyMatrix> {
        let nvars = self.nvars();
        let (rows, cols) = (target.rank(), source.rank());
        let shape_ok = m.rows.len() == rows && m.rows.iter().all(|r| r.len() == cols);
        let empty_ok = (rows == 0 || cols == 0) && m.rows.iter().all(|r| r.is_empty());
        if !shape_ok && !empty_ok {
            let found_cols = m.rows.first().map_or(0, |r| r.len());
            return Err(parse_err(
                m.line,
                1,
                format!("{what} must be {rows}x{cols}, found {}x{found_cols}", m.rows.len()),
            ));
        }
        let mut out = PolyMatrix::zero(nvars, source.clone(), target.clone());
        if rows == 0 || cols == 0 {
            return Ok(out);
        }
        for (r, row) in m.rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                let p = Poly::parse(&cell.text, nvars).map_err(|e| {
                    parse_err(cell.line, cell.column + e.column - 1, format!("in {what} entry ({r}, {c}): {}", e.message))
                })?;
                let want = out.required_degree(r, c);
                if !p.is_zero() && !p.is_homogeneous_of(want) {
                    let found = p.homogeneous_degree().map_or("inhomogeneous".to_string(), |d| format!("degree {d}"));
                    return Err(Error::DegreeMismatch(format!(
                        "line {}, column {}: {what} entry ({r}, {c}) = {} must be homogeneous of degree {want}, found {found}",
                        cell.line, cell.column, cell.text
                    )));
                }
                out.set(r, c, p);
            }
        }
        Ok(out)
    }

    pub fn resolution(&self) -> Result<TwistedComplex> {
        let lo = *self.levels.keys().next().expect("level 0 exists");
        let terms: Vec<FreeSheaf> = (lo..=0).map(|d| self.sheaf(d)).collect();
        let mut diffs = Vec::new();
        for d in lo..0 {
            let (s, t) = (self.sheaf(d), self.sheaf(d + 1));
            let what = format!("level {d} differential");
            let m = match &self.levels[&d].differential {
                Some(m) => self.poly_matrix(m, &s, &t, &what)?,
                None if s.is_zero() || t.is_zero() => PolyMatrix::zero(self.nvars(), s, t),
                None => {
                    return Err(parse_err(self.levels[&d].line, 1, format!("[level {d}] needs a 'differential' matrix")))
                }
            };
            diffs.push(m);
        }
        TwistedComplex::new(self.nvars(), lo, terms, diffs)
    }

    /// The quadratic sheaf, with shapes and degrees checked (not validated).
    pub fn quadratic_sheaf(&self) -> Result<QuadraticSheaf> {
        let w = self.resolution()?;
        let w0 = self.sheaf(0);
        let p = self.poly_matrix(&self.pairing, &w0, &w0.dual(), "pairing")?;
        QuadraticSheaf::new(self.ambient_dim, w, p, self.sign)
    }

    /// The cocycle in the [extension] section, if any.
    pub fn cocycle(&self, q: &QuadraticSheaf) -> Result<Option<Cocycle1>> {
        let Some(ext) = &self.extension else { return Ok(None) };
        let mut c = Cocycle1::zero(q);
        if let Some(m) = &ext.eta {
            c.eta = self.poly_matrix(m, q.resolution.term(-1), q.w0(), "eta")?;
        }
        if let Some(m) = &ext.psi {
            c.psi = self.poly_matrix(m, q.w0(), &q.w0().dual(), "psi")?;
        }
        Ok(Some(c))
    }

    /// Compares the [presentation] section with a recomputed realization;
    /// returns the names of the blocks that differ.
    pub fn presentation_mismatches(&self, f: &FirstOrderDeformation) -> Result<Vec<String>> {
        let Some(p) = &self.presentation else { return Ok(Vec::new()) };
        let rel = f.relations();
        let blocks: [(&str, &Option<CellMatrix>, &PolyMatrix); 4] = [
            ("relations", &p.relations, &rel),
            ("i", &p.i, &f.inclusion_i),
            ("j", &p.j, &f.projection_j),
            ("phi", &p.phi, &f.phi),
        ];
        let mut out = Vec::new();
        for (name, given, want) in blocks {
            match given {
                None => out.push(format!("{name} (missing)")),
                Some(m) => {
                    if self.poly_matrix(m, want.source(), want.target(), name)? != *want {
                        out.push(name.to_string());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Canonical document for a sheaf.
    pub fn from_sheaf(q: &QuadraticSheaf, window: Option<u32>) -> Document {
        let w = &q.resolution;
        let mut levels = BTreeMap::new();
        let lo = w.min_degree().min(0);
        for d in lo..=0 {
            let differential = (d < 0).then(|| CellMatrix::from_poly_matrix(&w.differential(d)));
            levels.insert(d, Level { degree: d, twists: w.term(d).twists.clone(), differential, line: 0 });
        }
        Document {
            ambient_dim: q.n,
            sign: q.sign,
            window,
            levels,
            pairing: CellMatrix::from_poly_matrix(&q.pairing),
            extension: None,
            presentation: None,
            comments: Vec::new(),
        }
    }

    pub fn with_extension(mut self, c: &Cocycle1) -> Self {
        self.extension = Some(Extension {
            eta: Some(CellMatrix::from_poly_matrix(&c.eta)),
            psi: Some(CellMatrix::from_poly_matrix(&c.psi)),
            line: 0,
        });
        self
    }

    pub fn with_presentation(mut self, f: &FirstOrderDeformation) -> Self {
        self.presentation = Some(PresentationBlock {
            relations: Some(CellMatrix::from_poly_matrix(&f.relations())),
            i: Some(CellMatrix::from_poly_matrix(&f.inclusion_i)),
            j: Some(CellMatrix::from_poly_matrix(&f.projection_j)),
            phi: Some(CellMatrix::from_poly_matrix(&f.phi)),
            line: 0,
        });
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            if c.is_empty() {
                s.push_str("#\n");
            } else {
                let _ = writeln!(s, "# {c}");
            }
        }
        let _ = writeln!(s, "ambient_dim = {}", self.ambient_dim);
        let _ = writeln!(s, "sign = {}", self.sign);
        if let Some(w) = self.window {
            let _ = writeln!(s, "window = {w}");
        }
        for (d, l) in self.levels.iter().rev() {
            let _ = writeln!(s, "\n[level {d}]");
            let tw: Vec<String> = l.twists.iter().map(|t| t.to_string()).collect();
            let _ = writeln!(s, "twists = {}", tw.join(", "));
            if let Some(m) = &l.differential {
                s.push_str("differential =\n");
                render_rows(&mut s, m);
            }
        }
        s.push_str("\n[pairing]\n");
        render_rows(&mut s, &self.pairing);
        if let Some(e) = &self.extension {
            s.push_str("\n[extension]\n");
            for (k, m) in [("eta", &e.eta), ("psi", &e.psi)] {
                if let Some(m) = m {
                    let _ = writeln!(s, "{k} =");
                    render_rows(&mut s, m);
                }
            }
        }
        if let Some(p) = &self.presentation {
            s.push_str("\n[presentation]\n");
            for (k, m) in [("relations", &p.relations), ("i", &p.i), ("j", &p.j), ("phi", &p.phi)] {
                if let Some(m) = m {
                    let _ = writeln!(s, "{k} =");
                    render_rows(&mut s, m);
                }
            }
        }
        s
    }
}

fn render_rows(s: &mut String, m: &CellMatrix) {
    let texts = m.texts();
    let ncols = texts.first().map_or(0, |r| r.len());
    let widths: Vec<usize> =
        (0..ncols).map(|c| texts.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    for row in &texts {
        if row.is_empty() {
            s.push_str("  | |\n");
            continue;
        }
        // pad after the comma so entries line up in columns
        let last = row.len() - 1;
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, t)| if c == last { t.clone() } else { format!("{:<w$}", format!("{t},"), w = widths[c] + 1) })
            .collect();
        let _ = writeln!(s, "  | {} |", cells.join(" "));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RESOLVED: &str = "\
# O(1) + O(-1) on P^1
ambient_dim = 1
sign = -

[level 0]
twists = 0, 0, -1

[level -1]
twists = -1
differential =
  | x1 |
  | -x0 |
  | 0 |

[pairing]
  | 0, 0, x0 |
  | 0, 0, x1 |
  | -x0, -x1, 0 |   # trailing comment
";

    #[test]
    fn parses_and_round_trips() {
        let doc = Document::parse(RESOLVED).unwrap();
        assert_eq!(doc.comments, vec!["O(1) + O(-1) on P^1".to_string()]);
        let q = doc.quadratic_sheaf().unwrap();
        q.validate().unwrap();
        assert_eq!(q.w0().twists, vec![0, 0, -1]);
        let again = Document::parse(&doc.render()).unwrap();
        assert_eq!(again.quadratic_sheaf().unwrap(), q);
        assert_eq!(Document::parse(&again.render()).unwrap().render(), again.render());
        let canon = Document::from_sheaf(&q, Some(3));
        assert_eq!(Document::parse(&canon.render()).unwrap().quadratic_sheaf().unwrap(), q);
    }

    #[test]
    fn positioned_errors() {
        let bad = RESOLVED.replace("| -x0, -x1, 0 |", "| -x0, x1^, 0 |");
        match Document::parse(&bad).unwrap().quadratic_sheaf() {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (18, 13)),
            other => panic!("{other:?}"),
        }
        let bad = RESOLVED.replace("sign = -", "sign = *");
        assert!(matches!(Document::parse(&bad), Err(Error::Parse { line: 3, column: 8, .. })));
        let bad = RESOLVED.replace("[pairing]", "[pairings]");
        assert!(matches!(Document::parse(&bad), Err(Error::Parse { line: 15, .. })));
        let bad = RESOLVED.replace("| 0, 0, x1 |", "| 0, x1 |");
        assert!(matches!(Document::parse(&bad), Err(Error::Parse { line: 17, .. })));
        let bad = RESOLVED.replace("| x1 |", "| x1^2 |");
        assert!(matches!(Document::parse(&bad).unwrap().quadratic_sheaf(), Err(Error::DegreeMismatch(_))));
        let bad = RESOLVED.replace("ambient_dim = 1\n", "");
        assert!(matches!(Document::parse(&bad), Err(Error::Parse { .. })));
        let bad = RESOLVED.replace("twists = -1", "twists = -1, z");
        assert!(matches!(Document::parse(&bad), Err(Error::Parse { line: 9, column: 14, .. })));
    }

    #[test]
    fn unicode_minus_sign() {
        let doc = Document::parse(&RESOLVED.replace("sign = -", "sign = \u{2212}")).unwrap();
        assert_eq!(doc.sign, Sign::Minus);
    }
}
