//! Block (biconnected component) decomposition.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{Edge, EdgeId, Instance, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("the input graph is disconnected")]
    DisconnectedInput,
}

/// A maximal 2-connected subgraph, renumbered locally.
///
/// Local vertex and edge ids follow ascending order of the original ids.
/// A bridge of the input is a block with two vertices and one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub instance: Instance,
    /// Local vertex id to original vertex id.
    pub vertices: Vec<VertexId>,
    /// Local edge id to original edge id.
    pub edges: Vec<EdgeId>,
}

impl Block {
    pub fn is_bridge(&self) -> bool {
        self.edges.len() == 1
    }

    pub fn local_edge(&self, global: EdgeId) -> Option<EdgeId> {
        self.edges.binary_search(&global).ok()
    }

    pub fn local_vertex(&self, global: VertexId) -> Option<VertexId> {
        self.vertices.binary_search(&global).ok()
    }
}

/// Splits a connected instance into its blocks, ordered by smallest
/// original edge id. Isolated vertices are only allowed when `n == 1`.
pub fn blocks(inst: &Instance) -> Result<Vec<Block>, BlockError> {
    let groups = edge_groups(inst)?;
    let mut out: Vec<Block> = groups
        .into_iter()
        .map(|mut edges| {
            edges.sort_unstable();
            let mut vertices: Vec<VertexId> = edges
                .iter()
                .flat_map(|&e| [inst.edge(e).u, inst.edge(e).v])
                .collect();
            vertices.sort_unstable();
            vertices.dedup();
            let local = |x: VertexId| vertices.binary_search(&x).expect("block vertex");
            let local_edges = edges
                .iter()
                .map(|&e| {
                    let edge = inst.edge(e);
                    Edge::new(local(edge.u), local(edge.v), edge.cost)
                })
                .collect();
            let instance = Instance::new(vertices.len(), local_edges).expect("sub-instance of a valid instance");
            Block { instance, vertices, edges }
        })
        .collect();
    out.sort_by_key(|b| b.edges[0]);
    Ok(out)
}

/// Edge sets of the blocks, via the edge-stack variant of the lowpoint DFS.
fn edge_groups(inst: &Instance) -> Result<Vec<Vec<EdgeId>>, BlockError> {
    const UNSEEN: usize = usize::MAX;
    let n = inst.n();
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut time = 0usize;
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    let mut groups = Vec::new();
    // (vertex, edge used to enter it, next adjacency index)
    let mut stack: Vec<(VertexId, EdgeId, usize)> = Vec::new();

    disc[0] = 0;
    low[0] = 0;
    time += 1;
    stack.push((0, UNSEEN, 0));
    while let Some(top) = stack.last_mut() {
        let (v, parent_edge, next) = *top;
        let adj = inst.adjacency(v);
        if next < adj.len() {
            top.2 += 1;
            let (w, e) = adj[next];
            if e == parent_edge {
                continue;
            }
            if disc[w] == UNSEEN {
                disc[w] = time;
                low[w] = time;
                time += 1;
                edge_stack.push(e);
                stack.push((w, e, 0));
            } else if disc[w] < disc[v] {
                // back edge to an ancestor
                edge_stack.push(e);
                low[v] = low[v].min(disc[w]);
            }
            continue;
        }
        stack.pop();
        if let Some(&(p, _, _)) = stack.last() {
            low[p] = low[p].min(low[v]);
            if low[v] >= disc[p] {
                let mut group = Vec::new();
                while let Some(e) = edge_stack.pop() {
                    group.push(e);
                    if e == parent_edge {
                        break;
                    }
                }
                groups.push(group);
            }
        }
    }
    if disc.contains(&UNSEEN) {
        return Err(BlockError::DisconnectedInput);
    }
    Ok(groups)
}
