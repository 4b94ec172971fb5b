//! Line-oriented text formats for algebras, morphisms, elements, cells and
//! gauge paths.
//!
//! Parsers report the file label plus the line and column of the first
//! offending token.  Serializers emit one canonical form: fixed section
//! order, basis order for terms, ascending powers of t, every scalar as
//! `num/den` with positive denominator.  Canonical text parses back to the
//! same data, and parse followed by serialize reproduces canonical input
//! byte for byte.  The full grammar lives in `docs/formats.md`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_traits::Zero;

use crate::cells::{GaugePath, OneCell};
use crate::error::{Error, Result};
use crate::morphism::InfinityMorphism;
use crate::poly::Poly;
use crate::scalar::{format_scalar, parse_scalar, Scalar};
use crate::space::{BasisVector, Element, FilteredGradedSpace, PolyElement};
use crate::structure::{BracketOutput, SLInftyStructure};

fn parse_err(file: &str, line: usize, col: usize, msg: impl AsRef<str>) -> Error {
    Error::input(format!("{file}:{line}:{col}: {}", msg.as_ref()))
}

/// Split a line into `(column, token)` pairs; columns are 1-based and
/// counted in characters.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut col = 0usize;
    for (byte, ch) in line.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                out.push((c, &line[b..byte]));
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        out.push((c, &line[b..]));
    }
    out
}

/// Content lines of a file with their 1-based line numbers; blank lines
/// and `#` comments are skipped.
struct Reader<'a> {
    file: &'a str,
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str, file: &'a str) -> Self {
        let lines: Vec<(usize, &'a str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| {
                let t = l.trim_start();
                !t.is_empty() && !t.starts_with('#')
            })
            .collect();
        let last_line = text.lines().count().max(1);
        Reader {
            file,
            lines,
            pos: 0,
            last_line,
        }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.peek();
        if item.is_some() {
            self.pos += 1;
        }
        item
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<(usize, &'a str)>)> {
        match self.next() {
            Some((ln, line)) => Ok((ln, tokens(line))),
            None => Err(parse_err(
                self.file,
                self.last_line,
                1,
                format!("unexpected end of file, expected {what}"),
            )),
        }
    }

    fn err(&self, line: usize, col: usize, msg: impl AsRef<str>) -> Error {
        parse_err(self.file, line, col, msg)
    }
}

/// True when the line is a bare section keyword.
fn is_section(toks: &[(usize, &str)], keywords: &[&str]) -> bool {
    toks.len() == 1 && keywords.contains(&toks[0].1)
}

fn parse_int<T: std::str::FromStr>(
    rd: &Reader<'_>,
    line: usize,
    tok: (usize, &str),
    what: &str,
) -> Result<T> {
    tok.1
        .parse()
        .map_err(|_| rd.err(line, tok.0, format!("invalid {what} {:?}", tok.1)))
}

fn parse_scalar_tok(rd: &Reader<'_>, line: usize, tok: (usize, &str)) -> Result<Scalar> {
    parse_scalar(tok.1).map_err(|_| rd.err(line, tok.0, format!("invalid rational {:?}", tok.1)))
}

fn resolve_id(
    rd: &Reader<'_>,
    line: usize,
    tok: (usize, &str),
    space: &FilteredGradedSpace,
) -> Result<usize> {
    space.index_of(tok.1).ok_or_else(|| {
        rd.err(
            line,
            tok.0,
            format!("unknown basis id {:?} in space {:?}", tok.1, space.name),
        )
    })
}

/// Parse a constant line `<k> <id...> -> <id> <num/den>` against input and
/// output spaces.  Returns the input tuple, output index, and coefficient.
fn parse_constant_line(
    rd: &Reader<'_>,
    line: usize,
    toks: &[(usize, &str)],
    input_space: &FilteredGradedSpace,
    output_space: &FilteredGradedSpace,
) -> Result<(Vec<usize>, usize, Scalar)> {
    let arity: usize = parse_int(rd, line, toks[0], "arity")?;
    if arity == 0 {
        return Err(rd.err(line, toks[0].0, "arity must be at least 1"));
    }
    if toks.len() != arity + 4 {
        return Err(rd.err(
            line,
            toks[0].0,
            format!(
                "expected `{arity} <{arity} ids> -> <id> <num/den>`, found {} tokens",
                toks.len()
            ),
        ));
    }
    let mut tuple = Vec::with_capacity(arity);
    for &tok in &toks[1..=arity] {
        tuple.push(resolve_id(rd, line, tok, input_space)?);
    }
    let arrow = toks[arity + 1];
    if arrow.1 != "->" {
        return Err(rd.err(line, arrow.0, format!("expected `->`, found {:?}", arrow.1)));
    }
    let out = resolve_id(rd, line, toks[arity + 2], output_space)?;
    let coeff = parse_scalar_tok(rd, line, toks[arity + 3])?;
    Ok((tuple, out, coeff))
}

/// Duplicate detection key: the input multiset (order-insensitive) plus
/// the output index.
fn dup_key(tuple: &[usize], out: usize) -> (Vec<usize>, usize) {
    let mut sorted = tuple.to_vec();
    sorted.sort_unstable();
    (sorted, out)
}

/// Parse an algebra description.  `file` labels error locations.
pub fn parse_algebra(text: &str, file: &str) -> Result<SLInftyStructure> {
    let mut rd = Reader::new(text, file);

    let (ln, toks) = rd.expect("`space <name>`")?;
    if toks.len() != 2 || toks[0].1 != "space" {
        let col = toks.first().map(|t| t.0).unwrap_or(1);
        return Err(rd.err(ln, col, "expected `space <name>`"));
    }
    let name = toks[1].1.to_string();

    let mut basis = Vec::new();
    while let Some((ln, line)) = rd.peek() {
        let toks = tokens(line);
        if is_section(&toks, &["flags", "brackets"]) {
            break;
        }
        rd.next();
        if toks.len() != 3 {
            return Err(rd.err(ln, toks[0].0, "expected `<id> <degree> <weight>`"));
        }
        let degree: i64 = parse_int(&rd, ln, toks[1], "degree")?;
        let weight: i64 = parse_int(&rd, ln, toks[2], "weight")?;
        basis.push(BasisVector {
            id: toks[0].1.to_string(),
            degree,
            weight,
        });
    }

    let mut abelian = false;
    let mut w_min = 1i64;
    let mut n: Option<i64> = None;
    if let Some((_, line)) = rd.peek() {
        if is_section(&tokens(line), &["flags"]) {
            rd.next();
            while let Some((ln, line)) = rd.peek() {
                let toks = tokens(line);
                if is_section(&toks, &["brackets"]) {
                    break;
                }
                rd.next();
                if toks.len() != 1 {
                    return Err(rd.err(ln, toks[0].0, "expected one flag per line"));
                }
                let (col, tok) = toks[0];
                if tok == "abelian" {
                    abelian = true;
                } else if let Some(v) = tok.strip_prefix("wmin=") {
                    w_min = v
                        .parse()
                        .map_err(|_| rd.err(ln, col, format!("invalid wmin value {v:?}")))?;
                } else if let Some(v) = tok.strip_prefix("n=") {
                    n = Some(
                        v.parse()
                            .map_err(|_| rd.err(ln, col, format!("invalid n value {v:?}")))?,
                    );
                } else {
                    return Err(rd.err(ln, col, format!("unknown flag {tok:?}")));
                }
            }
        }
    }
    let n = n.unwrap_or_else(|| basis.iter().map(|v| v.weight).max().unwrap_or(w_min));
    let space = FilteredGradedSpace::new(name, basis, n, w_min)
        .map_err(|e| Error::input(format!("{file}: {e}")))?;

    let mut entries: Vec<(Vec<usize>, BracketOutput)> = Vec::new();
    let mut seen: BTreeSet<(Vec<usize>, usize)> = BTreeSet::new();
    if let Some((_, line)) = rd.peek() {
        if is_section(&tokens(line), &["brackets"]) {
            rd.next();
            while let Some((ln, line)) = rd.next() {
                let toks = tokens(line);
                let (tuple, out, coeff) =
                    parse_constant_line(&rd, ln, &toks, &space, &space)?;
                if !seen.insert(dup_key(&tuple, out)) {
                    return Err(rd.err(ln, toks[0].0, "duplicate bracket constant"));
                }
                entries.push((tuple, BTreeMap::from([(out, coeff)])));
            }
        }
    }
    if let Some((ln, line)) = rd.next() {
        let toks = tokens(line);
        return Err(rd.err(ln, toks[0].0, format!("unexpected line {:?}", line.trim())));
    }

    SLInftyStructure::new(&space, abelian, entries).map_err(|e| Error::input(format!("{file}: {e}")))
}

/// Canonical text for an algebra.  Refuses names and ids the grammar
/// cannot represent.
pub fn serialize_algebra(l: &SLInftyStructure) -> Result<String> {
    let space = &l.space;
    if space.name.is_empty() || space.name.chars().any(char::is_whitespace) {
        return Err(Error::input(format!(
            "space name {:?} cannot be serialized",
            space.name
        )));
    }
    let mut out = String::new();
    let _ = writeln!(out, "space {}", space.name);
    for v in &space.basis {
        let _ = writeln!(out, "{} {} {}", v.id, v.degree, v.weight);
    }
    out.push_str("flags\n");
    let _ = writeln!(out, "wmin={}", space.w_min);
    let _ = writeln!(out, "n={}", space.filtration_length);
    if l.abelian {
        out.push_str("abelian\n");
    }
    let mut lines = Vec::new();
    for (tuple, output) in l.constants() {
        for (j, c) in output {
            let ids: Vec<&str> = tuple.iter().map(|&i| space.basis[i].id.as_str()).collect();
            lines.push(format!(
                "{} {} -> {} {}",
                tuple.len(),
                ids.join(" "),
                space.basis[*j].id,
                format_scalar(c)
            ));
        }
    }
    if !lines.is_empty() {
        out.push_str("brackets\n");
        for line in lines {
            out.push_str(&line);
            out.push('\n');
        }
    }
    Ok(out)
}

/// A morphism file together with the algebra paths it references, kept
/// verbatim so the file serializes back unchanged.
#[derive(Debug, Clone)]
pub struct MorphismFile {
    pub source_path: String,
    pub target_path: String,
    pub morphism: InfinityMorphism,
}

/// Parse a morphism description against already-loaded endpoint algebras.
pub fn parse_morphism(
    text: &str,
    file: &str,
    source: &Arc<SLInftyStructure>,
    target: &Arc<SLInftyStructure>,
) -> Result<MorphismFile> {
    let mut rd = Reader::new(text, file);

    let mut paths = [String::new(), String::new()];
    for (slot, keyword) in ["source", "target"].iter().enumerate() {
        let (ln, toks) = rd.expect(&format!("`{keyword} <path>`"))?;
        if toks.len() != 2 || toks[0].1 != *keyword {
            let col = toks.first().map(|t| t.0).unwrap_or(1);
            return Err(rd.err(ln, col, format!("expected `{keyword} <path>`")));
        }
        paths[slot] = toks[1].1.to_string();
    }

    let (ln, toks) = rd.expect("`shift=<s>`")?;
    if toks.len() != 1 {
        return Err(rd.err(ln, toks[0].0, "expected `shift=<s>`"));
    }
    let shift: i64 = match toks[0].1.strip_prefix("shift=") {
        Some(v) => v
            .parse()
            .map_err(|_| rd.err(ln, toks[0].0, format!("invalid shift value {v:?}")))?,
        None => return Err(rd.err(ln, toks[0].0, "expected `shift=<s>`")),
    };

    let mut finite_sum_bound = None;
    if let Some((ln, line)) = rd.peek() {
        let toks = tokens(line);
        if let Some(v) = toks[0].1.strip_prefix("finitesum=") {
            if toks.len() != 1 {
                return Err(rd.err(ln, toks[0].0, "expected `finitesum=<M>`"));
            }
            finite_sum_bound = Some(v.parse::<usize>().map_err(|_| {
                rd.err(ln, toks[0].0, format!("invalid finitesum value {v:?}"))
            })?);
            rd.next();
        }
    }

    let (ln, toks) = rd.expect("`morphism`")?;
    if !is_section(&toks, &["morphism"]) {
        return Err(rd.err(ln, toks[0].0, "expected `morphism`"));
    }
    let mut entries: Vec<(Vec<usize>, BracketOutput)> = Vec::new();
    let mut seen: BTreeSet<(Vec<usize>, usize)> = BTreeSet::new();
    while let Some((ln, line)) = rd.next() {
        let toks = tokens(line);
        let (tuple, out, coeff) =
            parse_constant_line(&rd, ln, &toks, &source.space, &target.space)?;
        if !seen.insert(dup_key(&tuple, out)) {
            return Err(rd.err(ln, toks[0].0, "duplicate morphism constant"));
        }
        entries.push((tuple, BTreeMap::from([(out, coeff)])));
    }

    let morphism = InfinityMorphism::new(source, target, shift, finite_sum_bound, entries)
        .map_err(|e| Error::input(format!("{file}: {e}")))?;
    Ok(MorphismFile {
        source_path: paths[0].clone(),
        target_path: paths[1].clone(),
        morphism,
    })
}

/// Canonical text for a morphism file.
pub fn serialize_morphism(mf: &MorphismFile) -> Result<String> {
    for path in [&mf.source_path, &mf.target_path] {
        if path.is_empty() || path.chars().any(char::is_whitespace) {
            return Err(Error::input(format!("path {path:?} cannot be serialized")));
        }
    }
    let u = &mf.morphism;
    let mut out = String::new();
    let _ = writeln!(out, "source {}", mf.source_path);
    let _ = writeln!(out, "target {}", mf.target_path);
    let _ = writeln!(out, "shift={}", u.shift);
    if let Some(m) = u.finite_sum_bound {
        let _ = writeln!(out, "finitesum={m}");
    }
    out.push_str("morphism\n");
    for (tuple, output) in u.components() {
        for (j, c) in output {
            let ids: Vec<&str> = tuple
                .iter()
                .map(|&i| u.source.space.basis[i].id.as_str())
                .collect();
            let _ = writeln!(
                out,
                "{} {} -> {} {}",
                tuple.len(),
                ids.join(" "),
                u.target.space.basis[*j].id,
                format_scalar(c)
            );
        }
    }
    Ok(out)
}

fn check_header_space(
    rd: &Reader<'_>,
    ln: usize,
    toks: &[(usize, &str)],
    kind: &str,
    space: &Arc<FilteredGradedSpace>,
) -> Result<()> {
    if toks.len() != 3 || toks[0].1 != kind || toks[1].1 != "in" {
        let col = toks.first().map(|t| t.0).unwrap_or(1);
        return Err(rd.err(ln, col, format!("expected `{kind} in <space>`")));
    }
    if toks[2].1 != space.name {
        return Err(rd.err(
            ln,
            toks[2].0,
            format!(
                "{kind} declares space {:?} but {:?} was provided",
                toks[2].1, space.name
            ),
        ));
    }
    Ok(())
}

/// Parse an element file against its space.
pub fn parse_element(
    text: &str,
    file: &str,
    space: &Arc<FilteredGradedSpace>,
) -> Result<Element> {
    let mut rd = Reader::new(text, file);
    let (ln, toks) = rd.expect("`element in <space>`")?;
    check_header_space(&rd, ln, &toks, "element", space)?;
    let mut coeffs: BTreeMap<usize, Scalar> = BTreeMap::new();
    while let Some((ln, line)) = rd.next() {
        let toks = tokens(line);
        if toks.len() != 2 {
            return Err(rd.err(ln, toks[0].0, "expected `<id> <num/den>`"));
        }
        let i = resolve_id(&rd, ln, toks[0], space)?;
        if coeffs.contains_key(&i) {
            return Err(rd.err(ln, toks[0].0, format!("duplicate term {:?}", toks[0].1)));
        }
        coeffs.insert(i, parse_scalar_tok(&rd, ln, toks[1])?);
    }
    Ok(Element::from_coeffs(space, coeffs))
}

/// Canonical text for an element.
pub fn serialize_element(e: &Element) -> Result<String> {
    if e.space.name.chars().any(char::is_whitespace) || e.space.name.is_empty() {
        return Err(Error::input(format!(
            "space name {:?} cannot be serialized",
            e.space.name
        )));
    }
    let mut out = String::new();
    let _ = writeln!(out, "element in {}", e.space.name);
    for (i, c) in &e.coeffs {
        let _ = writeln!(out, "{} {}", e.space.basis[*i].id, format_scalar(c));
    }
    Ok(out)
}

/// Parse the term lines of one polynomial section (`body` or `dt`) until
/// the next keyword in `stop`, accumulating `(basis, power) -> scalar`.
fn parse_poly_terms(
    rd: &mut Reader<'_>,
    space: &Arc<FilteredGradedSpace>,
    stop: &[&str],
) -> Result<PolyElement> {
    let mut terms: BTreeMap<usize, BTreeMap<usize, Scalar>> = BTreeMap::new();
    while let Some((ln, line)) = rd.peek() {
        let toks = tokens(line);
        if is_section(&toks, stop) {
            break;
        }
        rd.next();
        if toks.len() != 3 {
            return Err(rd.err(ln, toks[0].0, "expected `<id> <t-power> <num/den>`"));
        }
        let i = resolve_id(rd, ln, toks[0], space)?;
        let k: usize = parse_int(rd, ln, toks[1], "t-power")?;
        let c = parse_scalar_tok(rd, ln, toks[2])?;
        if terms.entry(i).or_default().insert(k, c).is_some() {
            return Err(rd.err(ln, toks[0].0, format!("duplicate term {:?}", toks[0].1)));
        }
    }
    let coeffs: BTreeMap<usize, Poly> = terms
        .into_iter()
        .map(|(i, by_power)| {
            let top = *by_power.keys().max().unwrap();
            let mut dense = vec![crate::scalar::zero(); top + 1];
            for (k, c) in by_power {
                dense[k] = c;
            }
            (i, Poly::from_coeffs(dense))
        })
        .collect();
    Ok(PolyElement::from_coeffs(space, coeffs))
}

fn expect_section(rd: &mut Reader<'_>, keyword: &str) -> Result<()> {
    let (ln, toks) = rd.expect(&format!("`{keyword}`"))?;
    if !is_section(&toks, &[keyword]) {
        return Err(rd.err(ln, toks[0].0, format!("expected `{keyword}`")));
    }
    Ok(())
}

/// Parse a one-cell file against its space.
pub fn parse_cell(text: &str, file: &str, space: &Arc<FilteredGradedSpace>) -> Result<OneCell> {
    let mut rd = Reader::new(text, file);
    let (ln, toks) = rd.expect("`cell in <space>`")?;
    check_header_space(&rd, ln, &toks, "cell", space)?;
    expect_section(&mut rd, "body")?;
    let body = parse_poly_terms(&mut rd, space, &["dt"])?;
    expect_section(&mut rd, "dt")?;
    let dt_part = parse_poly_terms(&mut rd, space, &[])?;
    if let Some((ln, line)) = rd.next() {
        let toks = tokens(line);
        return Err(rd.err(ln, toks[0].0, format!("unexpected line {:?}", line.trim())));
    }
    Ok(OneCell { body, dt_part })
}

fn write_poly_terms(out: &mut String, e: &PolyElement) {
    for (i, p) in &e.coeffs {
        for (k, c) in p.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let _ = writeln!(
                    out,
                    "{} {} {}",
                    e.space.basis[*i].id,
                    k,
                    format_scalar(c)
                );
            }
        }
    }
}

/// Canonical text for a one-cell.
pub fn serialize_cell(cell: &OneCell) -> Result<String> {
    let space = &cell.body.space;
    if space.name.chars().any(char::is_whitespace) || space.name.is_empty() {
        return Err(Error::input(format!(
            "space name {:?} cannot be serialized",
            space.name
        )));
    }
    let mut out = String::new();
    let _ = writeln!(out, "cell in {}", space.name);
    out.push_str("body\n");
    write_poly_terms(&mut out, &cell.body);
    out.push_str("dt\n");
    write_poly_terms(&mut out, &cell.dt_part);
    Ok(out)
}

/// Parse a gauge-path file: a `path` header followed by zero or more
/// `cell` blocks, each with `body` and `dt` sections.
pub fn parse_path(text: &str, file: &str, space: &Arc<FilteredGradedSpace>) -> Result<GaugePath> {
    let mut rd = Reader::new(text, file);
    let (ln, toks) = rd.expect("`path in <space>`")?;
    check_header_space(&rd, ln, &toks, "path", space)?;
    let mut cells = Vec::new();
    while let Some((ln, line)) = rd.next() {
        let toks = tokens(line);
        if !is_section(&toks, &["cell"]) {
            return Err(rd.err(ln, toks[0].0, "expected `cell`"));
        }
        expect_section(&mut rd, "body")?;
        let body = parse_poly_terms(&mut rd, space, &["dt"])?;
        expect_section(&mut rd, "dt")?;
        let dt_part = parse_poly_terms(&mut rd, space, &["cell"])?;
        cells.push(OneCell { body, dt_part });
    }
    Ok(GaugePath { cells })
}

/// Canonical text for a gauge path in the given space.  The space is
/// passed separately so the empty path still serializes.
pub fn serialize_path(path: &GaugePath, space: &Arc<FilteredGradedSpace>) -> Result<String> {
    if space.name.chars().any(char::is_whitespace) || space.name.is_empty() {
        return Err(Error::input(format!(
            "space name {:?} cannot be serialized",
            space.name
        )));
    }
    let mut out = String::new();
    let _ = writeln!(out, "path in {}", space.name);
    for cell in &path.cells {
        out.push_str("cell\n");
        out.push_str("body\n");
        write_poly_terms(&mut out, &cell.body);
        out.push_str("dt\n");
        write_poly_terms(&mut out, &cell.dt_part);
    }
    Ok(out)
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

/// Load an algebra file from disk.
pub fn load_algebra(path: &Path) -> Result<Arc<SLInftyStructure>> {
    let text = read_file(path)?;
    Ok(Arc::new(parse_algebra(&text, &path.display().to_string())?))
}

/// Load a morphism file from disk, together with its two endpoint
/// algebras.  The algebra paths inside the file resolve relative to the
/// morphism file's directory.
pub fn load_morphism(path: &Path) -> Result<MorphismFile> {
    let text = read_file(path)?;
    let file = path.display().to_string();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut rd = Reader::new(&text, &file);
    let mut endpoints = Vec::new();
    for keyword in ["source", "target"] {
        let (ln, toks) = rd.expect(&format!("`{keyword} <path>`"))?;
        if toks.len() != 2 || toks[0].1 != keyword {
            let col = toks.first().map(|t| t.0).unwrap_or(1);
            return Err(rd.err(ln, col, format!("expected `{keyword} <path>`")));
        }
        endpoints.push(load_algebra(&base.join(toks[1].1))?);
    }
    parse_morphism(&text, &file, &endpoints[0], &endpoints[1])
}

/// Load an element file from disk against a space.
pub fn load_element(path: &Path, space: &Arc<FilteredGradedSpace>) -> Result<Element> {
    let text = read_file(path)?;
    parse_element(&text, &path.display().to_string(), space)
}

/// Load a one-cell file from disk against a space.
pub fn load_cell(path: &Path, space: &Arc<FilteredGradedSpace>) -> Result<OneCell> {
    let text = read_file(path)?;
    parse_cell(&text, &path.display().to_string(), space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{from_i64, ratio};

    fn sample_algebra() -> SLInftyStructure {
        let s = FilteredGradedSpace::new(
            "L",
            vec![
                BasisVector { id: "y".into(), degree: -1, weight: 1 },
                BasisVector { id: "x".into(), degree: 0, weight: 1 },
                BasisVector { id: "w".into(), degree: 0, weight: 2 },
                BasisVector { id: "z".into(), degree: 1, weight: 3 },
            ],
            3,
            1,
        )
        .unwrap();
        SLInftyStructure::new(
            &s,
            false,
            vec![
                (vec![0], BTreeMap::from([(1usize, from_i64(1))])),
                (vec![2], BTreeMap::from([(3usize, from_i64(1))])),
                (vec![1, 1], BTreeMap::from([(3usize, from_i64(-1))])),
                (vec![0, 1], BTreeMap::from([(2usize, ratio(1, 2))])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn algebra_text_round_trips_byte_for_byte() {
        let l = sample_algebra();
        let text = serialize_algebra(&l).unwrap();
        let parsed = parse_algebra(&text, "sample.alg").unwrap();
        assert_eq!(serialize_algebra(&parsed).unwrap(), text);
        assert_eq!(parsed.space, l.space);
        assert_eq!(parsed.abelian, l.abelian);
        let before: Vec<_> = l.constants().collect();
        let after: Vec<_> = parsed.constants().collect();
        assert_eq!(before, after);
    }

    #[test]
    fn parser_reports_line_and_column() {
        let text = "space L\nx 0 one\n";
        let err = parse_algebra(text, "bad.alg").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.alg:2:5"), "got {msg}");

        let text = "space L\nx 0 1\nbrackets\n1 q -> x 1/1\n";
        let err = parse_algebra(text, "bad.alg").unwrap_err();
        assert!(err.to_string().contains("bad.alg:4:3"), "got {err}");

        let text = "space L\nx 0 1\nflags\nn=2\nbrackets\n1 x -> x 1/1\n1 x -> x 1/1\n";
        let err = parse_algebra(text, "dup.alg").unwrap_err();
        assert!(err.to_string().contains("dup.alg:7"), "got {err}");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a sample\nspace L\n\nx 0 1\n# weights\nflags\nwmin=1\nn=1\n";
        let parsed = parse_algebra(text, "c.alg").unwrap();
        assert_eq!(parsed.space.dim(), 1);
        assert_eq!(parsed.space.filtration_length, 1);
    }

    #[test]
    fn filtration_length_defaults_to_the_deepest_weight() {
        let text = "space L\nx 0 1\nw 0 2\n";
        let parsed = parse_algebra(text, "d.alg").unwrap();
        assert_eq!(parsed.space.filtration_length, 2);
        assert_eq!(parsed.space.w_min, 1);
    }

    #[test]
    fn morphism_text_round_trips_against_its_endpoints() {
        let l = Arc::new(sample_algebra());
        let text = "source a.alg\ntarget a.alg\nshift=0\nmorphism\n1 y -> y 1/1\n1 x -> x 1/1\n2 x x -> w 1/1\n1 w -> w 1/1\n1 z -> z 1/1\n";
        let mf = parse_morphism(text, "id.mor", &l, &l).unwrap();
        assert_eq!(serialize_morphism(&mf).unwrap(), text);
        assert_eq!(mf.morphism.shift, 0);
        assert!(mf.morphism.finite_sum_bound.is_none());

        let with_bound =
            "source a.alg\ntarget a.alg\nshift=1\nfinitesum=2\nmorphism\n1 x -> x 1/1\n";
        let mf = parse_morphism(with_bound, "b.mor", &l, &l).unwrap();
        assert_eq!(mf.morphism.finite_sum_bound, Some(2));
        assert_eq!(serialize_morphism(&mf).unwrap(), with_bound);
    }

    #[test]
    fn element_and_cell_files_round_trip() {
        let l = sample_algebra();
        let s = &l.space;
        let e = Element::from_coeffs(
            s,
            BTreeMap::from([(1usize, from_i64(1)), (2usize, ratio(-1, 2))]),
        );
        let text = serialize_element(&e).unwrap();
        assert_eq!(text, "element in L\nx 1/1\nw -1/2\n");
        assert_eq!(parse_element(&text, "e.elt", s).unwrap(), e);

        let cell = OneCell {
            body: PolyElement::from_coeffs(
                s,
                BTreeMap::from([(
                    1usize,
                    Poly::from_coeffs(vec![from_i64(1), ratio(-1, 3)]),
                )]),
            ),
            dt_part: PolyElement::from_element(&Element::basis_element(s, 0)),
        };
        let text = serialize_cell(&cell).unwrap();
        let parsed = parse_cell(&text, "c.cell", s).unwrap();
        assert_eq!(serialize_cell(&parsed).unwrap(), text);
        assert_eq!(parsed.body, cell.body);
        assert_eq!(parsed.dt_part, cell.dt_part);
    }

    #[test]
    fn a_mismatched_space_reference_is_located() {
        let l = sample_algebra();
        let err = parse_element("element in M\nx 1/1\n", "m.elt", &l.space).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("m.elt:1:12"), "got {msg}");
        assert!(msg.contains("declares space \"M\""), "got {msg}");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn path_files_hold_cell_chains() {
        let l = sample_algebra();
        let s = &l.space;
        let cell = OneCell {
            body: PolyElement::from_coeffs(
                s,
                BTreeMap::from([(1usize, Poly::from_coeffs(vec![from_i64(1), from_i64(2)]))]),
            ),
            dt_part: PolyElement::from_element(&Element::basis_element(s, 0)),
        };
        let path = GaugePath {
            cells: vec![cell.clone(), cell],
        };
        let text = serialize_path(&path, s).unwrap();
        let parsed = parse_path(&text, "p.path", s).unwrap();
        assert_eq!(parsed.cells.len(), 2);
        assert_eq!(serialize_path(&parsed, s).unwrap(), text);

        let empty = parse_path("path in L\n", "p.path", s).unwrap();
        assert!(empty.cells.is_empty());
        assert_eq!(serialize_path(&empty, s).unwrap(), "path in L\n");
    }
}
