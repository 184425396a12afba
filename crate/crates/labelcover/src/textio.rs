//! Plain-text serialization for instances, labelings, and multilabelings.
//!
//! Instance format (whitespace-separated decimal integers, `#` starts a
//! comment line):
//!
//! ```text
//! labelcover 1
//! sigma 2
//! na 2
//! nb 2
//! e 0 0 0 1
//! e 0 1 0 0
//! e 1 0 1 0
//! e 1 1 0 1
//! ```
//!
//! Each `e A B T0 .. T(sigma-1)` line is one edge with its projection
//! table. Serialization emits edges in canonical order with single spaces
//! and a trailing newline, so parse ∘ serialize is the identity on
//! canonical instances.
//!
//! Labelings are `l SIDE INDEX SYMBOL` lines (one per vertex);
//! multilabelings are `m SIDE INDEX S1,S2,...` lines (vertices with empty
//! sets are omitted). SIDE is `a` or `b`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::instance::{Edge, Instance, InstanceError, Labeling, Multilabeling, Side, Symbol};

pub const FORMAT_NAME: &str = "labelcover";
pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("missing header, line {line}")]
    MissingHeader { line: usize },
    #[error("version mismatch: got {got}, supported {supported}, line {line}")]
    VersionMismatch { got: String, supported: u64, line: usize },
    #[error("expected `{expected}` line, line {line}")]
    ExpectedKeyword { expected: &'static str, line: usize },
    #[error("malformed integer `{token}`, line {line}")]
    BadInteger { token: String, line: usize },
    #[error("wrong token count (expected {expected}, got {got}), line {line}")]
    TokenCount { expected: usize, got: usize, line: usize },
    #[error("a index out of range, line {line}")]
    AOutOfRange { line: usize },
    #[error("b index out of range, line {line}")]
    BOutOfRange { line: usize },
    #[error("symbol out of range, line {line}")]
    SymbolOutOfRange { line: usize },
    #[error("duplicate edge, line {line}")]
    DuplicateEdge { line: usize },
    #[error("duplicate vertex line, line {line}")]
    DuplicateVertex { line: usize },
    #[error("unknown side `{side}`, line {line}")]
    UnknownSide { side: String, line: usize },
    #[error("missing assignment for vertex {side}{index}")]
    MissingVertex { side: char, index: usize },
    #[error("instance invariant violated: {0}")]
    Invalid(InstanceError),
}

/// Numbered, comment-stripped token lines.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

fn parse_int(token: &str, line: usize) -> Result<usize, ParseError> {
    token
        .parse::<usize>()
        .map_err(|_| ParseError::BadInteger { token: token.to_string(), line })
}

fn expect_kv(
    item: Option<(usize, Vec<&str>)>,
    keyword: &'static str,
    last_line: usize,
) -> Result<(usize, usize), ParseError> {
    let (line, tokens) =
        item.ok_or(ParseError::ExpectedKeyword { expected: keyword, line: last_line + 1 })?;
    if tokens[0] != keyword {
        return Err(ParseError::ExpectedKeyword { expected: keyword, line });
    }
    if tokens.len() != 2 {
        return Err(ParseError::TokenCount { expected: 2, got: tokens.len(), line });
    }
    Ok((line, parse_int(tokens[1], line)?))
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = content_lines(text);

    let (hline, header) = lines.next().ok_or(ParseError::MissingHeader { line: 1 })?;
    if header[0] != FORMAT_NAME {
        return Err(ParseError::MissingHeader { line: hline });
    }
    if header.len() != 2 || header[1] != FORMAT_VERSION.to_string() {
        return Err(ParseError::VersionMismatch {
            got: header.get(1).unwrap_or(&"").to_string(),
            supported: FORMAT_VERSION,
            line: hline,
        });
    }

    let (l1, sigma) = expect_kv(lines.next(), "sigma", hline)?;
    let (l2, n_a) = expect_kv(lines.next(), "na", l1)?;
    let (l3, n_b) = expect_kv(lines.next(), "nb", l2)?;
    let _ = l3;

    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line, tokens) in lines {
        if tokens[0] != "e" {
            return Err(ParseError::ExpectedKeyword { expected: "e", line });
        }
        if tokens.len() != 3 + sigma {
            return Err(ParseError::TokenCount { expected: 3 + sigma, got: tokens.len(), line });
        }
        let a = parse_int(tokens[1], line)?;
        let b = parse_int(tokens[2], line)?;
        if a >= n_a {
            return Err(ParseError::AOutOfRange { line });
        }
        if b >= n_b {
            return Err(ParseError::BOutOfRange { line });
        }
        let mut table = Vec::with_capacity(sigma);
        for t in &tokens[3..] {
            let entry = parse_int(t, line)?;
            if entry >= sigma {
                return Err(ParseError::SymbolOutOfRange { line });
            }
            table.push(entry);
        }
        if !seen.insert((a, b)) {
            return Err(ParseError::DuplicateEdge { line });
        }
        edges.push(Edge::new(a, b, table));
    }
    Instance::new(n_a, n_b, sigma, edges)
        .map_err(|mut errs| ParseError::Invalid(errs.remove(0)))
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "{FORMAT_NAME} {FORMAT_VERSION}").unwrap();
    writeln!(out, "sigma {}", inst.sigma()).unwrap();
    writeln!(out, "na {}", inst.n_a()).unwrap();
    writeln!(out, "nb {}", inst.n_b()).unwrap();
    for e in inst.edges() {
        write!(out, "e {} {}", e.a, e.b).unwrap();
        for &t in &e.table {
            write!(out, " {t}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn parse_side(token: &str, line: usize) -> Result<Side, ParseError> {
    match token {
        "a" => Ok(Side::A),
        "b" => Ok(Side::B),
        other => Err(ParseError::UnknownSide { side: other.to_string(), line }),
    }
}

fn check_vertex(
    side: Side,
    index: usize,
    inst: &Instance,
    line: usize,
) -> Result<(), ParseError> {
    let n = match side {
        Side::A => inst.n_a(),
        Side::B => inst.n_b(),
    };
    if index >= n {
        return Err(match side {
            Side::A => ParseError::AOutOfRange { line },
            Side::B => ParseError::BOutOfRange { line },
        });
    }
    Ok(())
}

/// Parse `l SIDE INDEX SYMBOL` lines; every vertex of `inst` must appear
/// exactly once.
pub fn parse_labeling(text: &str, inst: &Instance) -> Result<Labeling, ParseError> {
    let mut labels_a: Vec<Option<Symbol>> = vec![None; inst.n_a()];
    let mut labels_b: Vec<Option<Symbol>> = vec![None; inst.n_b()];
    for (line, tokens) in content_lines(text) {
        if tokens[0] != "l" {
            return Err(ParseError::ExpectedKeyword { expected: "l", line });
        }
        if tokens.len() != 4 {
            return Err(ParseError::TokenCount { expected: 4, got: tokens.len(), line });
        }
        let side = parse_side(tokens[1], line)?;
        let index = parse_int(tokens[2], line)?;
        check_vertex(side, index, inst, line)?;
        let symbol = parse_int(tokens[3], line)?;
        if symbol >= inst.sigma() {
            return Err(ParseError::SymbolOutOfRange { line });
        }
        let slot = match side {
            Side::A => &mut labels_a[index],
            Side::B => &mut labels_b[index],
        };
        if slot.is_some() {
            return Err(ParseError::DuplicateVertex { line });
        }
        *slot = Some(symbol);
    }
    let labels_a = labels_a
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or(ParseError::MissingVertex { side: 'a', index: i }))
        .collect::<Result<_, _>>()?;
    let labels_b = labels_b
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or(ParseError::MissingVertex { side: 'b', index: i }))
        .collect::<Result<_, _>>()?;
    Ok(Labeling::new(labels_a, labels_b))
}

pub fn serialize_labeling(phi: &Labeling) -> String {
    let mut out = String::new();
    for (i, s) in phi.labels_a.iter().enumerate() {
        writeln!(out, "l a {i} {s}").unwrap();
    }
    for (i, s) in phi.labels_b.iter().enumerate() {
        writeln!(out, "l b {i} {s}").unwrap();
    }
    out
}

/// Parse `m SIDE INDEX S1,S2,...` lines. Vertices without a line get the
/// empty set; a repeated vertex is an error. Symbol lists are
/// deduplicated and sorted.
pub fn parse_multilabeling(text: &str, inst: &Instance) -> Result<Multilabeling, ParseError> {
    let mut sets_a: Vec<Option<Vec<Symbol>>> = vec![None; inst.n_a()];
    let mut sets_b: Vec<Option<Vec<Symbol>>> = vec![None; inst.n_b()];
    for (line, tokens) in content_lines(text) {
        if tokens[0] != "m" {
            return Err(ParseError::ExpectedKeyword { expected: "m", line });
        }
        if tokens.len() != 4 {
            return Err(ParseError::TokenCount { expected: 4, got: tokens.len(), line });
        }
        let side = parse_side(tokens[1], line)?;
        let index = parse_int(tokens[2], line)?;
        check_vertex(side, index, inst, line)?;
        let mut symbols = Vec::new();
        for part in tokens[3].split(',') {
            let s = parse_int(part, line)?;
            if s >= inst.sigma() {
                return Err(ParseError::SymbolOutOfRange { line });
            }
            symbols.push(s);
        }
        symbols.sort_unstable();
        symbols.dedup();
        let slot = match side {
            Side::A => &mut sets_a[index],
            Side::B => &mut sets_b[index],
        };
        if slot.is_some() {
            return Err(ParseError::DuplicateVertex { line });
        }
        *slot = Some(symbols);
    }
    Ok(Multilabeling::from_sets(
        sets_a.into_iter().map(Option::unwrap_or_default).collect(),
        sets_b.into_iter().map(Option::unwrap_or_default).collect(),
    ))
}

pub fn serialize_multilabeling(psi: &Multilabeling) -> String {
    let mut out = String::new();
    let mut write_side = |side: Side, sets: &[Vec<Symbol>]| {
        for (i, set) in sets.iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            let joined =
                set.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
            writeln!(out, "m {} {i} {joined}", side.as_char()).unwrap();
        }
    };
    write_side(Side::A, psi.sets(Side::A));
    write_side(Side::B, psi.sets(Side::B));
    out
}
