mod common;

use common::brute_feasible;
use fap_core::instances::exhaustive_corpus;
use fap_core::segments::{classified_segments, enumerate_segments, high_degree_vertices};
use fap_core::solver::step1;
use fap_core::{Mode, Segment, SegmentCensus, Solution, Strength};

/// Strength from scratch: drop the segment's edges and internal vertices,
/// renumber what is left, and test it with the brute-force checker.
fn brute_strength(sol: &Solution<'_>, seg: &Segment, mode: Mode) -> Strength {
    let g = sol.instance();
    let internal = seg.internal_vertices();
    let keep: Vec<usize> = (0..g.n()).filter(|v| !internal.contains(v)).collect();
    let index = |v: usize| keep.iter().position(|&k| k == v).unwrap();
    let edges: Vec<(usize, usize)> = sol
        .edge_ids()
        .filter(|e| !seg.edges.contains(e))
        .map(|e| (index(g.edge(e).u), index(g.edge(e).v)))
        .collect();
    let alive = vec![true; edges.len()];
    if brute_feasible(keep.len(), &edges, &alive, mode) {
        Strength::Strong
    } else {
        Strength::Weak
    }
}

fn check(sol: &Solution<'_>, mode: Mode) {
    let g = sol.instance();
    let high = high_degree_vertices(sol);
    let segs = classified_segments(sol, mode);
    if high.is_empty() {
        assert!(segs.is_empty());
        return;
    }
    let mut owner = vec![0usize; g.m()];
    for s in &segs {
        assert_eq!(s.vertices.len(), s.edges.len() + 1);
        let (a, b) = s.ends();
        assert!(high.contains(&a) && high.contains(&b), "ends must have degree >= 3");
        assert!(a <= b);
        for v in s.internal_vertices() {
            assert_eq!(sol.degree(*v), 2);
        }
        for (i, &e) in s.edges.iter().enumerate() {
            assert!(sol.contains(e));
            let edge = g.edge(e);
            let (x, y) = (s.vertices[i], s.vertices[i + 1]);
            assert!((edge.u, edge.v) == (x, y) || (edge.u, edge.v) == (y, x));
            owner[e] += 1;
        }
        if s.is_closed() {
            assert_eq!(mode, Mode::TwoEc);
        }
        assert_eq!(s.strength, Some(brute_strength(sol, s, mode)));
        let (first, last) = s.side_edges();
        let middle_zero = s.edges.iter().skip(1).take(s.len().saturating_sub(2)).all(|&e| !g.cost(e).is_unit());
        let unit_side = g.cost(first).is_unit() || g.cost(last).is_unit();
        assert_eq!(s.special, s.is_strong() && s.len() >= 2 && middle_zero && unit_side);
    }
    for (e, &count) in owner.iter().enumerate() {
        assert_eq!(count, usize::from(sol.contains(e)), "edge {e} must lie in exactly one segment");
    }
    let c = SegmentCensus::of(sol, mode);
    assert_eq!(c.total, segs.len());
    assert_eq!(c.strong + c.weak, c.total);
    assert_eq!(c.special, segs.iter().filter(|s| s.special).count());
    assert_eq!(c.trivial, segs.iter().filter(|s| s.is_trivial()).count());
}

#[test]
fn corpus_segments_partition_and_classify() {
    for (i, g) in exhaustive_corpus().iter().enumerate() {
        if i % 7 != 0 {
            continue;
        }
        for mode in [Mode::TwoEc, Mode::TwoVc] {
            check(&Solution::full(g), mode);
            check(&step1(g, mode).unwrap().0, mode);
        }
    }
}

#[test]
fn theta_graph_segments() {
    // three internally disjoint 0-5 paths of lengths 1, 2 and 3
    let g = common::inst(5, &[(0, 4, 1), (0, 1, 1), (1, 4, 0), (0, 2, 1), (2, 3, 0), (3, 4, 1)]);
    let sol = Solution::full(&g);
    let segs = enumerate_segments(&sol);
    assert_eq!(segs.len(), 3);
    assert_eq!(segs[0].edges, vec![0]);
    assert_eq!(segs[1].vertices, vec![0, 1, 4]);
    assert_eq!(segs[2].vertices, vec![0, 2, 3, 4]);
    let c = SegmentCensus::of(&sol, Mode::TwoVc);
    assert_eq!((c.total, c.trivial, c.strong, c.special), (3, 1, 3, 2));
    check(&sol, Mode::TwoVc);
}
