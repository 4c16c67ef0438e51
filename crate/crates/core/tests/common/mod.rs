#![allow(dead_code)]

use fap_core::{Cost, Edge, Instance, Mode};

pub fn inst(n: usize, edges: &[(usize, usize, u32)]) -> Instance {
    let edges = edges
        .iter()
        .map(|&(u, v, c)| Edge::new(u, v, Cost::from_value(c).unwrap()))
        .collect();
    Instance::new(n, edges).unwrap()
}

/// Number of connected components of the graph on `n` vertices minus
/// `skip_vertex`, using only the edges in `edges` (by position) that are
/// marked alive. Plain union-find, nothing shared with the crate.
pub fn components(n: usize, edges: &[(usize, usize)], alive: &[bool], skip_vertex: Option<usize>) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, &(u, v)) in edges.iter().enumerate() {
        if !alive[i] || Some(u) == skip_vertex || Some(v) == skip_vertex {
            continue;
        }
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    (0..n).filter(|&v| Some(v) != skip_vertex).filter(|&v| find(&mut parent, v) == v).count()
}

/// Edges whose removal increases the number of components.
pub fn brute_bridges(n: usize, edges: &[(usize, usize)], alive: &[bool]) -> Vec<usize> {
    let base = components(n, edges, alive, None);
    (0..edges.len())
        .filter(|&i| alive[i])
        .filter(|&i| {
            let mut a = alive.to_vec();
            a[i] = false;
            components(n, edges, &a, None) > base
        })
        .collect()
}

/// Non-isolated vertices whose removal increases the number of components
/// (not counting the removed vertex itself).
pub fn brute_cut_vertices(n: usize, edges: &[(usize, usize)], alive: &[bool]) -> Vec<usize> {
    let base = components(n, edges, alive, None);
    (0..n)
        .filter(|&v| edges.iter().zip(alive).any(|(&(a, b), &on)| on && (a == v || b == v)))
        .filter(|&v| components(n, edges, alive, Some(v)) > base)
        .collect()
}

/// Feasibility straight from the definitions: spanning, connected, and no
/// single edge (2ec) or vertex (2vc) whose removal disconnects the rest.
pub fn brute_feasible(n: usize, edges: &[(usize, usize)], alive: &[bool], mode: Mode) -> bool {
    if !alive.iter().any(|&a| a) || components(n, edges, alive, None) != 1 {
        return false;
    }
    match mode {
        Mode::TwoEc => brute_bridges(n, edges, alive).is_empty(),
        Mode::TwoVc => n >= 3 && (0..n).all(|v| components(n, edges, alive, Some(v)) == 1),
    }
}

pub fn pairs(g: &Instance) -> Vec<(usize, usize)> {
    g.edges().iter().map(|e| (e.u, e.v)).collect()
}

/// Minimum cost over every edge subset, zero edges included in the search.
pub fn brute_opt(g: &Instance, mode: Mode) -> Option<u32> {
    let p = pairs(g);
    let m = g.m();
    assert!(m <= 16, "brute_opt is exponential");
    (0u32..1 << m)
        .filter_map(|mask| {
            let alive: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
            brute_feasible(g.n(), &p, &alive, mode)
                .then(|| (0..m).filter(|&i| alive[i]).map(|i| g.cost(i).value()).sum())
        })
        .min()
}

pub fn petersen(cost: u32) -> Instance {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5, cost));
        e.push((i, i + 5, cost));
        e.push((5 + i, 5 + (i + 2) % 5, cost));
    }
    inst(10, &e)
}
