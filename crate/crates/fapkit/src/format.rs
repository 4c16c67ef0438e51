//! Text formats for instances and dual solutions.
//!
//! Instance file: first line `n m`, then `m` lines `u v c` with 0-based
//! vertex ids and `c` in {0, 1}. Lines starting with `#` and blank lines are
//! ignored; fields are whitespace separated.
//!
//! Dual file: lines `Y v1,v2,...,vk p/q` give `y` of a vertex set and lines
//! `Z u v p/q` give `z` of the edge joining `u` and `v`. Values are exact
//! rationals written `p/q` or `p`.

use std::fmt::Write as _;

use fap_core::dual::{DualError, DualSolution, Rational};
use fap_core::{Cost, Edge, Instance, InstanceError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: InstanceError },
    #[error("line {line}: {source}")]
    Dual { line: usize, source: DualError },
}

fn malformed(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::MalformedLine { line, reason: reason.into() }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_field<T: std::str::FromStr>(line: usize, field: Option<&str>, what: &str) -> Result<T, ParseError> {
    let raw = field.ok_or_else(|| malformed(line, format!("missing {what}")))?;
    raw.parse().map_err(|_| malformed(line, format!("bad {what} {raw:?}")))
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| malformed(1, "missing header \"n m\""))?;
    let mut fields = header.split_whitespace();
    let n: usize = parse_field(hline, fields.next(), "vertex count")?;
    let m: usize = parse_field(hline, fields.next(), "edge count")?;
    if fields.next().is_some() {
        return Err(malformed(hline, "header has more than two fields"));
    }

    let mut edges = Vec::with_capacity(m);
    let mut line_of = Vec::with_capacity(m);
    for (line, body) in lines {
        if edges.len() == m {
            return Err(malformed(line, format!("more than {m} edge lines")));
        }
        let mut fields = body.split_whitespace();
        let u: usize = parse_field(line, fields.next(), "vertex")?;
        let v: usize = parse_field(line, fields.next(), "vertex")?;
        let c: u32 = parse_field(line, fields.next(), "cost")?;
        if fields.next().is_some() {
            return Err(malformed(line, "edge line has more than three fields"));
        }
        let cost = Cost::from_value(c).ok_or_else(|| malformed(line, format!("cost {c} is not 0 or 1")))?;
        edges.push(Edge::new(u, v, cost));
        line_of.push(line);
    }
    if edges.len() != m {
        return Err(malformed(hline, format!("header announces {m} edges, found {}", edges.len())));
    }
    Instance::new(n, edges).map_err(|source| {
        let line = match &source {
            InstanceError::SelfLoop { edge, .. }
            | InstanceError::DuplicateEdge { edge, .. }
            | InstanceError::ZeroEdgesNotForest { edge }
            | InstanceError::NonContiguousIds { edge, .. } => line_of[*edge],
            InstanceError::Empty => hline,
        };
        ParseError::Invalid { line, source }
    })
}

/// Serializes edges in id order; `parse_instance` inverts it.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = format!("{} {}\n", inst.n(), inst.m());
    for e in inst.edges() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, e.cost);
    }
    out
}

/// FNV-1a over the serialized instance; identifies the instance in traces.
pub fn fingerprint(inst: &Instance) -> u64 {
    write_instance(inst)
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.parse::<i64>().ok()?, q.parse::<i64>().ok()?),
        None => (s.parse::<i64>().ok()?, 1),
    };
    (q != 0).then(|| Rational::new(p, q))
}

pub fn format_rational(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_dual(inst: &Instance, text: &str) -> Result<DualSolution, ParseError> {
    let mut dual = DualSolution::new();
    for (line, body) in content_lines(text) {
        let fields: Vec<&str> = body.split_whitespace().collect();
        let value_of = |raw: &str| parse_rational(raw).ok_or_else(|| malformed(line, format!("bad rational {raw:?}")));
        let dual_err = |source| ParseError::Dual { line, source };
        match fields.as_slice() {
            ["Y", set, value] => {
                let vertices = set
                    .split(',')
                    .map(|v| v.parse::<usize>().map_err(|_| malformed(line, format!("bad vertex {v:?}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                dual.set_y(vertices, value_of(value)?).map_err(dual_err)?;
            }
            ["Z", u, v, value] => {
                let u: usize = parse_field(line, Some(u), "vertex")?;
                let v: usize = parse_field(line, Some(v), "vertex")?;
                let e = inst
                    .find_edge(u, v)
                    .ok_or_else(|| malformed(line, format!("no edge joins {u} and {v}")))?;
                dual.set_z(e, value_of(value)?).map_err(dual_err)?;
            }
            _ => return Err(malformed(line, "expected \"Y v1,..,vk p/q\" or \"Z u v p/q\"")),
        }
    }
    Ok(dual)
}

pub fn write_dual(inst: &Instance, dual: &DualSolution) -> String {
    let mut out = String::new();
    for (set, value) in dual.y() {
        let set: Vec<String> = set.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "Y {} {}", set.join(","), format_rational(value));
    }
    for (e, value) in dual.z() {
        let edge = inst.edge(e);
        let _ = writeln!(out, "Z {} {} {}", edge.u, edge.v, format_rational(value));
    }
    out
}

/// Comma-separated list, empty string for an empty list.
pub fn join_ids(ids: impl IntoIterator<Item = usize>) -> String {
    ids.into_iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}
