//! Line-oriented solver trace, one event per line.
//!
//! ```text
//! trace      := "fapkit-trace 1" NL "instance" HEX NL "mode" MODE NL block* final
//! block      := "block" INDEX NL ("s1" EDGE NL)* event*
//! event      := "push" EDGE | "pop" EDGE VERTEX | "removed" EDGE* | "kept" EDGE
//! final      := "final" COST EDGE* NL
//! ```
//!
//! `HEX` is the instance fingerprint (16 lowercase hex digits), `MODE` is
//! `2ec` or `2vc`. Edge and vertex ids refer to the instance file. Blocks
//! appear in the order the solver visits them. `removed` lists the edges
//! deleted by the reverse-delete after a pop, in deletion order.

use std::fmt::Write as _;

use fap_core::solver::{replay, ReplayError};
use fap_core::{BlockTrace, EdgeId, Event, Instance, Mode, RunReport, SegmentCensus, Solution};
use thiserror::Error;

use crate::format::fingerprint;

pub const MAGIC: &str = "fapkit-trace 1";

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("trace was recorded for instance {expected:016x}, not {found:016x}")]
    WrongInstance { expected: u64, found: u64 },
    #[error("replay failed: {0}")]
    Replay(#[from] ReplayError),
    #[error("replayed solution {replayed:?} differs from the recorded final solution {recorded:?}")]
    FinalMismatch { recorded: Vec<EdgeId>, replayed: Vec<EdgeId> },
    #[error("a fresh solve produces a different trace (first difference at line {line})")]
    Diverges { line: usize },
}

/// A parsed trace file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub fingerprint: u64,
    pub mode: Mode,
    pub blocks: Vec<BlockTrace>,
    pub final_cost: u32,
    pub final_edges: Vec<EdgeId>,
}

impl Trace {
    /// The report skeleton that [`replay`] consumes. Statistics that the
    /// file does not carry are left at zero.
    pub fn report(&self) -> RunReport {
        RunReport {
            mode: self.mode,
            blocks: self.blocks.clone(),
            final_cost: self.final_cost,
            census: SegmentCensus::default(),
        }
    }
}

fn ids(ids: &[EdgeId]) -> String {
    ids.iter().map(|e| format!(" {e}")).collect()
}

pub fn write_trace(inst: &Instance, report: &RunReport, sol: &Solution<'_>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "instance {:016x}", fingerprint(inst));
    let _ = writeln!(out, "mode {}", report.mode);
    for (i, block) in report.blocks.iter().enumerate() {
        let _ = writeln!(out, "block {i}");
        for e in &block.step1_removed {
            let _ = writeln!(out, "s1 {e}");
        }
        for ev in &block.events {
            let _ = match ev {
                Event::Push { edge } => writeln!(out, "push {edge}"),
                Event::Pop { edge, side_vertex } => writeln!(out, "pop {edge} {side_vertex}"),
                Event::Removed { edges } => writeln!(out, "removed{}", ids(edges)),
                Event::Kept { edge } => writeln!(out, "kept {edge}"),
            };
        }
    }
    let edges: Vec<EdgeId> = sol.edge_ids().collect();
    let _ = writeln!(out, "final {}{}", sol.cost(), ids(&edges));
    out
}

pub fn parse_trace(text: &str) -> Result<Trace, TraceError> {
    let bad = |line: usize, reason: &str| TraceError::Malformed { line, reason: reason.to_string() };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let num = |line: usize, raw: &str| raw.parse::<usize>().map_err(|_| bad(line, "expected a non-negative integer"));

    match lines.next() {
        Some((_, l)) if l == MAGIC => {}
        _ => return Err(bad(1, "missing trace header")),
    }
    let fingerprint = match lines.next() {
        Some((n, l)) => l
            .strip_prefix("instance ")
            .and_then(|h| u64::from_str_radix(h, 16).ok())
            .ok_or_else(|| bad(n, "expected \"instance <hex>\""))?,
        None => return Err(bad(2, "missing instance line")),
    };
    let mode = match lines.next() {
        Some((n, l)) => l
            .strip_prefix("mode ")
            .and_then(Mode::parse)
            .ok_or_else(|| bad(n, "expected \"mode 2ec|2vc\""))?,
        None => return Err(bad(3, "missing mode line")),
    };

    let mut blocks: Vec<BlockTrace> = Vec::new();
    let mut last = 3;
    for (n, l) in lines.by_ref() {
        last = n;
        let mut f = l.split_whitespace();
        let key = f.next().unwrap_or("");
        let rest: Vec<&str> = f.collect();
        if key == "final" {
            let (cost, edges) = rest.split_first().ok_or_else(|| bad(n, "final line needs a cost"))?;
            let final_cost = num(n, cost)? as u32;
            let final_edges = edges.iter().map(|e| num(n, e)).collect::<Result<Vec<_>, _>>()?;
            if let Some((extra, _)) = lines.next() {
                return Err(bad(extra, "content after the final line"));
            }
            return Ok(Trace { fingerprint, mode, blocks, final_cost, final_edges });
        }
        if key == "block" {
            if rest.len() != 1 || num(n, rest[0])? != blocks.len() {
                return Err(bad(n, "blocks must be numbered 0, 1, 2, ..."));
            }
            blocks.push(BlockTrace::default());
            continue;
        }
        let block = blocks.last_mut().ok_or_else(|| bad(n, "event before the first block line"))?;
        let args = rest.iter().map(|x| num(n, x)).collect::<Result<Vec<_>, _>>()?;
        match (key, args.as_slice()) {
            ("s1", [e]) => {
                if !block.events.is_empty() {
                    return Err(bad(n, "step-1 removal after step-2 events"));
                }
                block.step1_removed.push(*e);
            }
            ("push", [e]) => {
                block.pushes += 1;
                block.events.push(Event::Push { edge: *e });
            }
            ("pop", [e, u]) => block.events.push(Event::Pop { edge: *e, side_vertex: *u }),
            ("removed", edges) => block.events.push(Event::Removed { edges: edges.to_vec() }),
            ("kept", [e]) => block.events.push(Event::Kept { edge: *e }),
            _ => return Err(bad(n, "unknown event or wrong number of fields")),
        }
    }
    Err(bad(last, "missing final line"))
}

/// Checks a trace against an instance: fingerprint, event-by-event replay,
/// the recorded final solution, and byte equality with a fresh solve.
/// Returns the replayed solution.
pub fn verify<'a>(inst: &'a Instance, text: &str) -> Result<Solution<'a>, TraceError> {
    let trace = parse_trace(text)?;
    let found = fingerprint(inst);
    if trace.fingerprint != found {
        return Err(TraceError::WrongInstance { expected: trace.fingerprint, found });
    }
    let sol = replay(inst, &trace.report())?;
    let replayed: Vec<EdgeId> = sol.edge_ids().collect();
    if replayed != trace.final_edges || sol.cost() != trace.final_cost {
        return Err(TraceError::FinalMismatch { recorded: trace.final_edges, replayed });
    }
    let (fresh_sol, fresh) = fap_core::solve(inst, &fap_core::SolveOptions::new(trace.mode))
        .map_err(|e| TraceError::Replay(ReplayError::Instance(e)))?;
    let again = write_trace(inst, &fresh, &fresh_sol);
    if let Some(line) = again.lines().zip(text.lines()).position(|(a, b)| a != b.trim_end()) {
        return Err(TraceError::Diverges { line: line + 1 });
    }
    if again.lines().count() != text.lines().count() {
        return Err(TraceError::Diverges { line: again.lines().count().min(text.lines().count()) + 1 });
    }
    Ok(sol)
}
