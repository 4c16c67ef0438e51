//! Reverse-delete and the two-step forest augmentation algorithm.
//!
//! Step 1 runs reverse-delete over the unit-cost edges of the whole graph,
//! which keeps every zero-cost edge. Step 2 scans the leftover edges
//! `H = E \ F0` once each: an unvisited edge touching a side vertex of a
//! special segment is pushed on a stack, and every pop `f = (u, v)` re-runs
//! reverse-delete on `F + f` with the unit edges of `F` first and `f` last,
//! then pushes at most one unvisited edge of `H` at a side vertex of a
//! special segment ending at `v`.
//!
//! All scans use ascending edge ids, so a run is a pure function of the
//! instance and the mode.

use alloc::vec::Vec;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::blocks::{blocks, Block, BlockError};
use crate::connectivity::Mode;
use crate::graph::{EdgeId, Instance, Solution, VertexId};
use crate::segments::{special_segments, Segment, SegmentCensus};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("the input has fewer than three vertices")]
    TooFewVertices,
    #[error("the input graph is disconnected")]
    DisconnectedInput,
    #[error("edge {edge} is a bridge of the input, so no 2-edge-connected spanning subgraph exists")]
    BridgeInInput { edge: EdgeId },
    #[error("the starting edge set is not feasible")]
    InfeasibleInput,
    #[error("edge {edge} is not in the solution")]
    EdgeNotInSolution { edge: EdgeId },
}

impl From<BlockError> for SolveError {
    fn from(e: BlockError) -> Self {
        match e {
            BlockError::DisconnectedInput => SolveError::DisconnectedInput,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub mode: Mode,
    /// Re-check feasibility after every reverse-delete call. Always on in
    /// debug builds.
    pub check_each_step: bool,
}

impl SolveOptions {
    pub fn new(mode: Mode) -> Self {
        SolveOptions { mode, check_each_step: false }
    }

    fn checking(&self) -> bool {
        self.check_each_step || cfg!(debug_assertions)
    }
}

/// One step-2 event. Edge and vertex ids refer to the original instance.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Event {
    Push { edge: EdgeId },
    Pop { edge: EdgeId, side_vertex: VertexId },
    /// Edges deleted by the reverse-delete that follows a pop, in deletion
    /// order. May contain the popped edge itself, and may be empty.
    Removed { edges: Vec<EdgeId> },
    /// The popped edge survived its reverse-delete.
    Kept { edge: EdgeId },
}

/// Trace of one block. Ids refer to the original instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockTrace {
    pub step1_removed: Vec<EdgeId>,
    pub events: Vec<Event>,
    pub step1_cost: u32,
    pub final_cost: u32,
    /// `|E \ F0|` of the block.
    pub h_size: usize,
    pub pushes: usize,
    /// Pops where reading "end vertex v" as "v is an endpoint of a side edge"
    /// would have pushed a different edge (or none).
    pub end_vertex_divergences: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub mode: Mode,
    pub blocks: Vec<BlockTrace>,
    pub final_cost: u32,
    pub census: SegmentCensus,
}

impl RunReport {
    pub fn step1_cost(&self) -> u32 {
        self.blocks.iter().map(|b| b.step1_cost).sum()
    }

    pub fn pushes(&self) -> usize {
        self.blocks.iter().map(|b| b.pushes).sum()
    }

    pub fn h_size(&self) -> usize {
        self.blocks.iter().map(|b| b.h_size).sum()
    }
}

/// Tries to delete the edges of `a`, then those of `b`, each list in
/// ascending id order; an edge goes if the rest stays feasible. Returns the
/// result and the deleted edges in deletion order.
pub fn reverse_delete<'a>(
    f: Solution<'a>,
    a: &[EdgeId],
    b: &[EdgeId],
    mode: Mode,
) -> Result<(Solution<'a>, Vec<EdgeId>), SolveError> {
    if !f.is_feasible(mode) {
        return Err(SolveError::InfeasibleInput);
    }
    let mut f = f;
    let mut removed = Vec::new();
    for list in [a, b] {
        let mut order = list.to_vec();
        order.sort_unstable();
        order.dedup();
        for e in order {
            if !f.contains(e) {
                if removed.contains(&e) {
                    continue;
                }
                return Err(SolveError::EdgeNotInSolution { edge: e });
            }
            f.remove(e);
            if f.is_feasible(mode) {
                removed.push(e);
            } else {
                f.insert(e);
            }
        }
    }
    Ok((f, removed))
}

/// Step 1: reverse-delete over all unit-cost edges of `inst`, starting from
/// every edge. Returns the minimal solution and the deleted edges.
pub fn step1(inst: &Instance, mode: Mode) -> Result<(Solution<'_>, Vec<EdgeId>), SolveError> {
    let units: Vec<EdgeId> = inst.unit_edges().collect();
    reverse_delete(Solution::full(inst), &units, &[], mode)
}

/// Step 2 on a single 2-connected instance, starting from the step-1 result.
/// Event ids are local to `inst`.
pub fn step2<'a>(
    inst: &'a Instance,
    f0: Solution<'a>,
    opts: &SolveOptions,
) -> Result<(Solution<'a>, BlockTrace), SolveError> {
    let mode = opts.mode;
    let h: Vec<EdgeId> = (0..inst.m()).filter(|&e| !f0.contains(e)).collect();
    let mut visited = FixedBitSet::with_capacity(inst.m());
    let mut trace = BlockTrace { step1_cost: f0.cost(), h_size: h.len(), ..BlockTrace::default() };
    let mut f = f0;
    let start_cost = f.cost();

    loop {
        let specials = special_segments(&f, mode);
        let Some((e, u)) = first_candidate(inst, &h, &visited, &specials, |_| true) else {
            break;
        };
        let mut stack: Vec<(EdgeId, VertexId)> = Vec::new();
        visited.insert(e);
        trace.pushes += 1;
        trace.events.push(Event::Push { edge: e });
        stack.push((e, u));

        while let Some((edge, side)) = stack.pop() {
            trace.events.push(Event::Pop { edge, side_vertex: side });
            let v = inst.edge(edge).other(side);
            let before = f.cost();
            let units = f.unit_edge_ids();
            let mut grown = f.clone();
            grown.insert(edge);
            let (next, removed) = reverse_delete(grown, &units, &[edge], mode)?;
            debug_assert!(removed.iter().all(|&r| r == edge || inst.cost(r).is_unit()));
            if opts.checking() {
                assert!(next.is_feasible(mode), "reverse-delete returned an infeasible solution");
            }
            assert!(next.cost() <= before, "step-2 iteration raised the cost");
            f = next;
            let kept = f.contains(edge);
            trace.events.push(Event::Removed { edges: removed });
            if kept {
                trace.events.push(Event::Kept { edge });
            }

            let specials = special_segments(&f, mode);
            let ends_at_v = first_candidate(inst, &h, &visited, &specials, |s| s.has_end(v));
            let side_edge_at_v = first_candidate(inst, &h, &visited, &specials, |s| {
                s.has_end(v) || s.is_side_vertex(v)
            });
            if ends_at_v.map(|c| c.0) != side_edge_at_v.map(|c| c.0) {
                trace.end_vertex_divergences += 1;
            }
            if let Some((g, gu)) = ends_at_v {
                visited.insert(g);
                trace.pushes += 1;
                trace.events.push(Event::Push { edge: g });
                stack.push((g, gu));
            }
        }
    }
    assert!(trace.pushes <= trace.h_size, "an edge of H was pushed twice");
    assert!(f.cost() <= start_cost);
    trace.final_cost = f.cost();
    Ok((f, trace))
}

/// Smallest unvisited edge of `h` incident to a side vertex of a special
/// segment accepted by `keep`, with that side vertex (the smaller one if
/// both endpoints qualify).
fn first_candidate(
    inst: &Instance,
    h: &[EdgeId],
    visited: &FixedBitSet,
    specials: &[Segment],
    keep: impl Fn(&Segment) -> bool,
) -> Option<(EdgeId, VertexId)> {
    let mut sides = FixedBitSet::with_capacity(inst.n());
    for s in specials.iter().filter(|s| keep(s)) {
        let (a, b) = s.side_vertices();
        sides.insert(a);
        sides.insert(b);
    }
    if sides.is_clear() {
        return None;
    }
    h.iter().filter(|&&e| !visited.contains(e)).find_map(|&e| {
        let edge = inst.edge(e);
        match (sides.contains(edge.u), sides.contains(edge.v)) {
            (true, true) => Some((e, edge.u.min(edge.v))),
            (true, false) => Some((e, edge.u)),
            (false, true) => Some((e, edge.v)),
            (false, false) => None,
        }
    })
}

/// Solves each block with step 1 and step 2 and returns the union.
pub fn solve<'a>(inst: &'a Instance, opts: &SolveOptions) -> Result<(Solution<'a>, RunReport), SolveError> {
    let parts = checked_blocks(inst)?;
    let mut members = inst.empty_set();
    let mut report = RunReport { mode: opts.mode, blocks: Vec::new(), final_cost: 0, census: SegmentCensus::default() };

    for block in &parts {
        let local = &block.instance;
        let (f0, removed) = step1(local, opts.mode)?;
        let (f, mut trace) = step2(local, f0, opts)?;
        debug_assert!(local.zero_edges().all(|e| f.contains(e)));
        trace.step1_removed = removed.iter().map(|&e| block.edges[e]).collect();
        for ev in &mut trace.events {
            globalize(ev, block);
        }
        report.census.add(&SegmentCensus::of(&f, opts.mode));
        for e in f.edge_ids() {
            members.insert(block.edges[e]);
        }
        report.blocks.push(trace);
    }

    let sol = Solution::new(inst, members);
    report.final_cost = sol.cost();
    if opts.checking() {
        assert!(blockwise_feasible(&sol, opts.mode), "solve produced an infeasible solution");
    }
    Ok((sol, report))
}

fn checked_blocks(inst: &Instance) -> Result<Vec<Block>, SolveError> {
    if inst.n() < 3 {
        return Err(SolveError::TooFewVertices);
    }
    let parts = blocks(inst)?;
    if let Some(b) = parts.iter().find(|b| b.is_bridge()) {
        return Err(SolveError::BridgeInInput { edge: b.edges[0] });
    }
    Ok(parts)
}

fn globalize(ev: &mut Event, block: &Block) {
    match ev {
        Event::Push { edge } | Event::Kept { edge } => *edge = block.edges[*edge],
        Event::Pop { edge, side_vertex } => {
            *edge = block.edges[*edge];
            *side_vertex = block.vertices[*side_vertex];
        }
        Event::Removed { edges } => {
            for e in edges {
                *e = block.edges[*e];
            }
        }
    }
}

/// Feasibility of a solution on a possibly multi-block instance: in 2-vertex
/// mode every block's restriction must be 2-connected, since a graph with a
/// cut vertex has no 2-connected spanning subgraph at all.
pub fn blockwise_feasible(sol: &Solution<'_>, mode: Mode) -> bool {
    if mode == Mode::TwoEc {
        return sol.is_feasible(mode);
    }
    let Ok(parts) = blocks(sol.instance()) else {
        return false;
    };
    parts.iter().all(|b| {
        let local = Solution::from_edges(
            &b.instance,
            (0..b.edges.len()).filter(|&e| sol.contains(b.edges[e])),
        );
        local.is_feasible(mode)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("cannot replay on this instance: {0}")]
    Instance(SolveError),
    #[error("trace has {found} blocks, the instance has {expected}")]
    BlockCount { expected: usize, found: usize },
    #[error("block {block}: edge {edge} does not belong to this block")]
    ForeignEdge { block: usize, edge: EdgeId },
    #[error("block {block}: step-1 removal of edge {edge} is not allowed")]
    Step1Rejected { block: usize, edge: EdgeId },
    #[error("block {block}, event {index}: {reason}")]
    BadEvent { block: usize, index: usize, reason: &'static str },
    #[error("block {block}: trace ends with a non-empty stack")]
    Unfinished { block: usize },
}

/// Re-applies a trace to `inst`, checking feasibility after every deletion
/// and the stack discipline of step 2, and returns the resulting solution.
pub fn replay<'a>(inst: &'a Instance, report: &RunReport) -> Result<Solution<'a>, ReplayError> {
    let mode = report.mode;
    let parts = checked_blocks(inst).map_err(ReplayError::Instance)?;
    if parts.len() != report.blocks.len() {
        return Err(ReplayError::BlockCount { expected: parts.len(), found: report.blocks.len() });
    }
    let mut members = inst.empty_set();
    for (bi, (block, trace)) in parts.iter().zip(&report.blocks).enumerate() {
        let f = replay_block(bi, block, trace, mode)?;
        for e in f.edge_ids() {
            members.insert(block.edges[e]);
        }
    }
    Ok(Solution::new(inst, members))
}

fn replay_block<'a>(
    bi: usize,
    block: &'a Block,
    trace: &BlockTrace,
    mode: Mode,
) -> Result<Solution<'a>, ReplayError> {
    let local = &block.instance;
    let to_local = |e: EdgeId| block.local_edge(e).ok_or(ReplayError::ForeignEdge { block: bi, edge: e });
    let bad = |index: usize, reason: &'static str| ReplayError::BadEvent { block: bi, index, reason };

    let mut f = Solution::full(local);
    for &g in &trace.step1_removed {
        let e = to_local(g)?;
        if !local.cost(e).is_unit() || !f.remove(e) || !f.is_feasible(mode) {
            return Err(ReplayError::Step1Rejected { block: bi, edge: g });
        }
    }
    let h: FixedBitSet = (0..local.m()).filter(|&e| !f.contains(e)).collect();
    let mut visited = FixedBitSet::with_capacity(local.m());
    let mut stack: Vec<EdgeId> = Vec::new();
    // popped edge awaiting its Removed event, then its Kept event
    let mut pending_removed: Option<EdgeId> = None;
    let mut pending_kept: Option<EdgeId> = None;

    for (i, ev) in trace.events.iter().enumerate() {
        if let Some(p) = pending_kept.take() {
            if let Event::Kept { edge } = ev {
                if to_local(*edge)? != p {
                    return Err(bad(i, "kept edge is not the popped edge"));
                }
                continue;
            }
            return Err(bad(i, "popped edge survived but no Kept event follows"));
        }
        if pending_removed.is_some() && !matches!(ev, Event::Removed { .. }) {
            return Err(bad(i, "expected the Removed event of the last pop"));
        }
        match ev {
            Event::Push { edge } => {
                let e = to_local(*edge)?;
                if !h.contains(e) || visited.contains(e) {
                    return Err(bad(i, "pushed edge is not an unvisited edge of H"));
                }
                visited.insert(e);
                stack.push(e);
            }
            Event::Pop { edge, side_vertex } => {
                let e = to_local(*edge)?;
                if stack.pop() != Some(e) {
                    return Err(bad(i, "popped edge is not on top of the stack"));
                }
                let touches = block.local_vertex(*side_vertex).is_some_and(|u| local.edge(e).touches(u));
                if !touches {
                    return Err(bad(i, "side vertex is not an endpoint of the popped edge"));
                }
                f.insert(e);
                pending_removed = Some(e);
            }
            Event::Removed { edges } => {
                let Some(p) = pending_removed.take() else {
                    return Err(bad(i, "Removed event without a pop"));
                };
                for &g in edges {
                    let e = to_local(g)?;
                    if !(local.cost(e).is_unit() || e == p) || !f.remove(e) || !f.is_feasible(mode) {
                        return Err(bad(i, "removal breaks feasibility or is not allowed"));
                    }
                }
                if f.contains(p) {
                    pending_kept = Some(p);
                }
            }
            Event::Kept { .. } => return Err(bad(i, "Kept event out of place")),
        }
    }
    if pending_kept.is_some() || pending_removed.is_some() {
        return Err(bad(trace.events.len(), "trace ends inside a pop"));
    }
    if !stack.is_empty() {
        return Err(ReplayError::Unfinished { block: bi });
    }
    Ok(f)
}
