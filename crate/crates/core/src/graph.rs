//! Instances and solutions.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::connectivity::{self, EdgeView, Mode};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Bitset over edge ids.
pub type EdgeSet = FixedBitSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cost {
    Zero,
    Unit,
}

impl Cost {
    pub fn value(self) -> u32 {
        match self {
            Cost::Zero => 0,
            Cost::Unit => 1,
        }
    }

    pub fn from_value(c: u32) -> Option<Cost> {
        match c {
            0 => Some(Cost::Zero),
            1 => Some(Cost::Unit),
            _ => None,
        }
    }

    pub fn is_unit(self) -> bool {
        self == Cost::Unit
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub cost: Cost,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId, cost: Cost) -> Self {
        Edge { u, v, cost }
    }

    /// The endpoint opposite to `x`. `x` must be an endpoint.
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            debug_assert_eq!(x, self.v);
            self.u
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("edge {edge} is a self-loop on vertex {vertex}")]
    SelfLoop { edge: EdgeId, vertex: VertexId },
    #[error("edge {edge} duplicates edge {first}")]
    DuplicateEdge { edge: EdgeId, first: EdgeId },
    #[error("zero-cost edge {edge} closes a cycle among zero-cost edges")]
    ZeroEdgesNotForest { edge: EdgeId },
    #[error("edge {edge} uses vertex {vertex}, but ids must lie in 0..{n}")]
    NonContiguousIds { edge: EdgeId, vertex: VertexId, n: usize },
    #[error("an instance needs at least one vertex")]
    Empty,
}

/// A simple undirected graph with {0,1} edge costs whose zero-cost edges
/// form a forest. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl Instance {
    /// Validates and builds an instance. Edge ids follow the order of `edges`.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, InstanceError> {
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        let mut seen: BTreeSet<(VertexId, VertexId, EdgeId)> = BTreeSet::new();
        let mut adj = vec![Vec::new(); n];
        let mut forest = DisjointSets::new(n);
        for (id, e) in edges.iter().enumerate() {
            for x in [e.u, e.v] {
                if x >= n {
                    return Err(InstanceError::NonContiguousIds { edge: id, vertex: x, n });
                }
            }
            if e.u == e.v {
                return Err(InstanceError::SelfLoop { edge: id, vertex: e.u });
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if let Some(&(_, _, first)) = seen.range((key.0, key.1, 0)..=(key.0, key.1, usize::MAX)).next() {
                return Err(InstanceError::DuplicateEdge { edge: id, first });
            }
            seen.insert((key.0, key.1, id));
            if e.cost == Cost::Zero && !forest.union(e.u, e.v) {
                return Err(InstanceError::ZeroEdgesNotForest { edge: id });
            }
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        Ok(Instance { n, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(neighbour, edge id)` pairs in edge-id order.
    pub fn adjacency(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn cost(&self, id: EdgeId) -> Cost {
        self.edges[id].cost
    }

    pub fn unit_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.m()).filter(move |&e| self.edges[e].cost.is_unit())
    }

    pub fn zero_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.m()).filter(move |&e| !self.edges[e].cost.is_unit())
    }

    pub fn unit_count(&self) -> usize {
        self.unit_edges().count()
    }

    pub fn all_edges(&self) -> EdgeSet {
        let mut s = EdgeSet::with_capacity(self.m());
        s.insert_range(..);
        s
    }

    pub fn empty_set(&self) -> EdgeSet {
        EdgeSet::with_capacity(self.m())
    }

    /// Id of the edge joining `u` and `v`, if any.
    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.adj
            .get(u)?
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
    }
}

/// A subset of an instance's edges with its cost cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution<'a> {
    inst: &'a Instance,
    members: EdgeSet,
    cost: u32,
}

impl<'a> Solution<'a> {
    pub fn new(inst: &'a Instance, mut members: EdgeSet) -> Self {
        members.grow(inst.m());
        let cost = members.ones().map(|e| inst.cost(e).value()).sum();
        Solution { inst, members, cost }
    }

    pub fn from_edges(inst: &'a Instance, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        let mut members = inst.empty_set();
        for e in edges {
            members.insert(e);
        }
        Solution::new(inst, members)
    }

    /// Every edge of the instance.
    pub fn full(inst: &'a Instance) -> Self {
        Solution::new(inst, inst.all_edges())
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn members(&self) -> &EdgeSet {
        &self.members
    }

    pub fn into_members(self) -> EdgeSet {
        self.members
    }

    pub fn cost(&self) -> u32 {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.members.contains(e)
    }

    /// Member edge ids in ascending order.
    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.members.ones()
    }

    /// Unit-cost member edges in ascending id order.
    pub fn unit_edge_ids(&self) -> Vec<EdgeId> {
        self.members.ones().filter(|&e| self.inst.cost(e).is_unit()).collect()
    }

    pub fn insert(&mut self, e: EdgeId) -> bool {
        if self.members.put(e) {
            return false;
        }
        self.cost += self.inst.cost(e).value();
        true
    }

    pub fn remove(&mut self, e: EdgeId) -> bool {
        if !self.members.contains(e) {
            return false;
        }
        self.members.set(e, false);
        self.cost -= self.inst.cost(e).value();
        true
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.inst
            .adjacency(v)
            .iter()
            .filter(|&&(_, e)| self.members.contains(e))
            .count()
    }

    /// Member edges incident to `v`, in edge-id order.
    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        self.inst
            .adjacency(v)
            .iter()
            .copied()
            .filter(move |&(_, e)| self.members.contains(e))
    }

    pub fn view(&self) -> EdgeView<'_> {
        EdgeView::new(self.inst, &self.members)
    }

    pub fn is_feasible(&self, mode: Mode) -> bool {
        connectivity::is_feasible(&self.view(), mode)
    }
}

/// Union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}
