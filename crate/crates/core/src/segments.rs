//! Segments: maximal paths whose internal vertices have degree two in the
//! current solution, with their strong/weak and special classification.

use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::connectivity::{feasible_on, Mode};
use crate::graph::{Cost, EdgeId, Solution, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strength {
    /// Removing the segment's edges and internal vertices keeps the rest feasible.
    Strong,
    Weak,
}

/// A maximal plain path `v1 .. vk` of a solution.
///
/// Segments are oriented so that `v1 <= vk`; a closed segment (both ends at
/// the same vertex, only possible in 2-edge-connected solutions) starts with
/// its smaller side edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    /// `None` until [`classify`] has run.
    pub strength: Option<Strength>,
    pub special: bool,
}

impl Segment {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.len() == 1
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.first() == self.vertices.last()
    }

    pub fn ends(&self) -> (VertexId, VertexId) {
        (self.vertices[0], self.vertices[self.vertices.len() - 1])
    }

    /// `(v2, v_{k-1})`; the same vertex twice for a 2-segment. Meaningless
    /// for trivial segments, where it returns the end vertices.
    pub fn side_vertices(&self) -> (VertexId, VertexId) {
        let k = self.vertices.len();
        if k == 2 {
            return self.ends();
        }
        (self.vertices[1], self.vertices[k - 2])
    }

    pub fn side_edges(&self) -> (EdgeId, EdgeId) {
        (self.edges[0], self.edges[self.edges.len() - 1])
    }

    pub fn internal_vertices(&self) -> &[VertexId] {
        &self.vertices[1..self.vertices.len() - 1]
    }

    pub fn has_end(&self, v: VertexId) -> bool {
        let (a, b) = self.ends();
        a == v || b == v
    }

    pub fn is_side_vertex(&self, v: VertexId) -> bool {
        if self.is_trivial() {
            return false;
        }
        let (a, b) = self.side_vertices();
        a == v || b == v
    }

    pub fn is_strong(&self) -> bool {
        self.strength == Some(Strength::Strong)
    }

    fn min_edge(&self) -> EdgeId {
        *self.edges.iter().min().expect("segment has an edge")
    }
}

/// Vertices of degree at least three in the solution.
pub fn high_degree_vertices(sol: &Solution<'_>) -> Vec<VertexId> {
    (0..sol.instance().n()).filter(|&v| sol.degree(v) >= 3).collect()
}

/// All segments of `sol`, unclassified, ordered by smallest contained edge
/// id. Empty when no vertex has degree three or more (a single cycle).
pub fn enumerate_segments(sol: &Solution<'_>) -> Vec<Segment> {
    let inst = sol.instance();
    let n = inst.n();
    let degree: Vec<usize> = (0..n).map(|v| sol.degree(v)).collect();
    let mut used = FixedBitSet::with_capacity(inst.m());
    let mut out = Vec::new();

    for start in (0..n).filter(|&v| degree[v] >= 3) {
        for (first_next, first_edge) in sol.incident(start) {
            if used.contains(first_edge) {
                continue;
            }
            let mut vertices = alloc::vec![start];
            let mut edges = alloc::vec![first_edge];
            used.insert(first_edge);
            let (mut prev_edge, mut cur) = (first_edge, first_next);
            while degree[cur] == 2 {
                let next = sol.incident(cur).find(|&(_, e)| e != prev_edge);
                let Some((w, e)) = next else { break };
                vertices.push(cur);
                edges.push(e);
                used.insert(e);
                prev_edge = e;
                cur = w;
            }
            vertices.push(cur);
            out.push(orient(Segment { vertices, edges, strength: None, special: false }));
        }
    }
    out.sort_by_key(Segment::min_edge);
    out
}

fn orient(mut seg: Segment) -> Segment {
    let (a, b) = seg.ends();
    let flip = if a == b { seg.edges[seg.edges.len() - 1] < seg.edges[0] } else { b < a };
    if flip {
        seg.vertices.reverse();
        seg.edges.reverse();
    }
    seg
}

/// Whether the segment's costs match a special segment: at least one unit
/// side edge and every other edge zero-cost. Length must be at least two.
pub fn has_special_costs(seg: &Segment, sol: &Solution<'_>) -> bool {
    let inst = sol.instance();
    let l = seg.len();
    if l < 2 {
        return false;
    }
    let (s1, s2) = seg.side_edges();
    let sides = inst.cost(s1).value() + inst.cost(s2).value();
    sides >= 1 && seg.edges[1..l - 1].iter().all(|&e| inst.cost(e) == Cost::Zero)
}

/// Strength of a segment: feasibility of the solution after removing the
/// segment's edges and internal vertices.
pub fn strength(seg: &Segment, sol: &Solution<'_>, mode: Mode) -> Strength {
    let inst = sol.instance();
    let mut rest = sol.members().clone();
    for &e in &seg.edges {
        rest.set(e, false);
    }
    let mut removed = FixedBitSet::with_capacity(inst.n());
    for &v in seg.internal_vertices() {
        removed.insert(v);
    }
    if feasible_on(inst, &rest, Some(&removed), mode) {
        Strength::Strong
    } else {
        Strength::Weak
    }
}

/// Fills in strength and the special flag.
pub fn classify(mut seg: Segment, sol: &Solution<'_>, mode: Mode) -> Segment {
    let s = strength(&seg, sol, mode);
    seg.strength = Some(s);
    seg.special = s == Strength::Strong && has_special_costs(&seg, sol);
    seg
}

pub fn classified_segments(sol: &Solution<'_>, mode: Mode) -> Vec<Segment> {
    enumerate_segments(sol).into_iter().map(|s| classify(s, sol, mode)).collect()
}

/// The special segments of `sol`. Strength is only computed for segments
/// whose costs already qualify.
pub fn special_segments(sol: &Solution<'_>, mode: Mode) -> Vec<Segment> {
    enumerate_segments(sol)
        .into_iter()
        .filter(|s| has_special_costs(s, sol))
        .map(|s| classify(s, sol, mode))
        .filter(|s| s.special)
        .collect()
}

/// Segment counts by classification.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SegmentCensus {
    pub total: usize,
    pub trivial: usize,
    pub strong: usize,
    pub weak: usize,
    pub special: usize,
    /// Segments whose two ends coincide (2-edge-connected mode only).
    pub closed: usize,
}

impl SegmentCensus {
    pub fn of(sol: &Solution<'_>, mode: Mode) -> Self {
        let mut c = SegmentCensus::default();
        for s in classified_segments(sol, mode) {
            c.total += 1;
            c.trivial += usize::from(s.is_trivial());
            c.closed += usize::from(s.is_closed());
            c.special += usize::from(s.special);
            match s.strength {
                Some(Strength::Strong) => c.strong += 1,
                _ => c.weak += 1,
            }
        }
        c
    }

    pub fn add(&mut self, other: &SegmentCensus) {
        self.total += other.total;
        self.trivial += other.trivial;
        self.strong += other.strong;
        self.weak += other.weak;
        self.special += other.special;
        self.closed += other.closed;
    }
}
