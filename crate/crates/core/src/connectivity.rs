//! Connectivity predicates on spanning subgraphs.
//!
//! Every query runs a single iterative lowpoint DFS over the active edges,
//! O(n + m). Nothing is maintained incrementally.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use fixedbitset::FixedBitSet;

use crate::graph::{EdgeId, EdgeSet, Instance, VertexId};

/// Which connectivity a feasible solution must have.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    /// 2-edge-connected spanning subgraph.
    TwoEc,
    /// 2-vertex-connected spanning subgraph. Needs at least three vertices.
    #[default]
    TwoVc,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::TwoEc => "2ec",
            Mode::TwoVc => "2vc",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "2ec" => Some(Mode::TwoEc),
            "2vc" => Some(Mode::TwoVc),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The spanning subgraph `(V, active)` of an instance.
#[derive(Clone, Copy, Debug)]
pub struct EdgeView<'a> {
    inst: &'a Instance,
    active: &'a EdgeSet,
}

impl<'a> EdgeView<'a> {
    pub fn new(inst: &'a Instance, active: &'a EdgeSet) -> Self {
        EdgeView { inst, active }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn active(&self) -> &'a EdgeSet {
        self.active
    }
}

/// Active edges whose removal disconnects a currently connected pair.
/// Ascending edge ids.
pub fn bridges(view: &EdgeView<'_>) -> Vec<EdgeId> {
    let mut out = Dfs::run(view.inst, view.active, None).bridges;
    out.sort_unstable();
    out
}

/// Cut vertices of the active subgraph, ignoring isolated vertices.
/// Ascending vertex ids.
pub fn articulation_points(view: &EdgeView<'_>) -> Vec<VertexId> {
    let scan = Dfs::run(view.inst, view.active, None);
    scan.cut.ones().collect()
}

/// Whether the active edges form a spanning subgraph with the connectivity
/// `mode` asks for.
pub fn is_feasible(view: &EdgeView<'_>, mode: Mode) -> bool {
    feasible_on(view.inst, view.active, None, mode)
}

/// Feasibility on the vertex set `V \ removed`. Active edges touching a
/// removed vertex are ignored.
pub(crate) fn feasible_on(
    inst: &Instance,
    active: &EdgeSet,
    removed: Option<&FixedBitSet>,
    mode: Mode,
) -> bool {
    let kept = inst.n() - removed.map_or(0, |r| r.count_ones(..));
    if kept == 0 || (mode == Mode::TwoVc && kept < 3) {
        return false;
    }
    let scan = Dfs::run(inst, active, removed);
    if scan.isolated > 0 || scan.components != 1 {
        return false;
    }
    match mode {
        Mode::TwoEc => scan.bridges.is_empty(),
        Mode::TwoVc => scan.cut.is_clear(),
    }
}

const UNSEEN: usize = usize::MAX;

struct Frame {
    v: VertexId,
    parent_edge: EdgeId,
    next: usize,
}

struct Dfs {
    components: usize,
    isolated: usize,
    bridges: Vec<EdgeId>,
    cut: FixedBitSet,
}

impl Dfs {
    fn run(inst: &Instance, active: &EdgeSet, removed: Option<&FixedBitSet>) -> Dfs {
        let n = inst.n();
        let gone = |v: VertexId| removed.is_some_and(|r| r.contains(v));
        let live = |e: EdgeId| {
            if !active.contains(e) {
                return false;
            }
            let edge = inst.edge(e);
            !gone(edge.u) && !gone(edge.v)
        };

        let mut disc = vec![UNSEEN; n];
        let mut low = vec![0usize; n];
        let mut out = Dfs { components: 0, isolated: 0, bridges: Vec::new(), cut: FixedBitSet::with_capacity(n) };
        let mut time = 0usize;
        let mut stack: Vec<Frame> = Vec::new();

        for root in 0..n {
            if gone(root) || disc[root] != UNSEEN {
                continue;
            }
            if !inst.adjacency(root).iter().any(|&(_, e)| live(e)) {
                out.isolated += 1;
                continue;
            }
            out.components += 1;
            disc[root] = time;
            low[root] = time;
            time += 1;
            let mut root_children = 0usize;
            stack.push(Frame { v: root, parent_edge: UNSEEN, next: 0 });

            while let Some(frame) = stack.last_mut() {
                let v = frame.v;
                let adj = inst.adjacency(v);
                if frame.next < adj.len() {
                    let (w, e) = adj[frame.next];
                    frame.next += 1;
                    if e == frame.parent_edge || !live(e) {
                        continue;
                    }
                    if disc[w] == UNSEEN {
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        stack.push(Frame { v: w, parent_edge: e, next: 0 });
                    } else if disc[w] < low[v] {
                        low[v] = disc[w];
                    }
                    continue;
                }
                let done = stack.pop().expect("frame");
                if let Some(parent) = stack.last() {
                    let p = parent.v;
                    if low[v] < low[p] {
                        low[p] = low[v];
                    }
                    if low[v] > disc[p] {
                        out.bridges.push(done.parent_edge);
                    }
                    if p == root {
                        root_children += 1;
                    } else if low[v] >= disc[p] {
                        out.cut.insert(p);
                    }
                }
            }
            if root_children >= 2 {
                out.cut.insert(root);
            }
        }
        out
    }
}
