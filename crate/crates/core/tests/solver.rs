mod common;

use common::{brute_feasible, inst, pairs};
use fap_core::instances::{exhaustive_corpus, gen_random, GenParams};
use fap_core::solver::{blockwise_feasible, replay, reverse_delete, step1, step2};
use fap_core::{solve, Edge, Event, Instance, Mode, Solution, SolveOptions};

fn opts(mode: Mode) -> SolveOptions {
    SolveOptions { mode, check_each_step: true }
}

fn brute_ok(sol: &Solution<'_>, mode: Mode) -> bool {
    let g = sol.instance();
    let alive: Vec<bool> = (0..g.m()).map(|e| sol.contains(e)).collect();
    brute_feasible(g.n(), &pairs(g), &alive, mode)
}

/// Every unit edge left in `f` is needed.
fn unit_minimal(f: &Solution<'_>, mode: Mode) -> bool {
    f.unit_edge_ids().into_iter().all(|e| {
        let mut less = f.clone();
        less.remove(e);
        !brute_ok(&less, mode)
    })
}

#[test]
fn corpus_runs_are_feasible_minimal_and_replayable() {
    let mut improved = 0;
    for g in exhaustive_corpus() {
        for mode in [Mode::TwoEc, Mode::TwoVc] {
            let (f0, _) = step1(&g, mode).unwrap();
            assert!(brute_ok(&f0, mode));
            assert!(unit_minimal(&f0, mode));

            let (sol, report) = solve(&g, &opts(mode)).unwrap();
            assert!(brute_ok(&sol, mode));
            assert!(g.zero_edges().all(|e| sol.contains(e)));
            assert!(sol.cost() <= report.step1_cost());
            assert!(report.pushes() <= report.h_size());
            assert_eq!(report.final_cost, sol.cost());
            assert_eq!(replay(&g, &report).unwrap(), sol);
            if sol.cost() < report.step1_cost() {
                improved += 1;
            }
        }
    }
    assert!(improved > 0, "step 2 never improved a corpus instance");
}

#[test]
fn step2_improves_k4_with_zero_path() {
    let g = inst(4, &[(0, 1, 0), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 0), (2, 3, 1)]);
    let (f0, removed) = step1(&g, Mode::TwoVc).unwrap();
    assert_eq!(removed, vec![1]);
    assert_eq!(f0.cost(), 3);
    let (f, trace) = step2(&g, f0, &opts(Mode::TwoVc)).unwrap();
    assert_eq!(f.cost(), 2);
    assert_eq!(f.edge_ids().collect::<Vec<_>>(), vec![0, 1, 4, 5]);
    assert_eq!(trace.h_size, 1);
    assert_eq!(trace.pushes, 1);
    assert!(matches!(trace.events[..], [Event::Push { edge: 1 }, Event::Pop { edge: 1, side_vertex: 0 }, ..]));
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

/// Cycle a..f with unit chords (a,c) and (a,e). The degree-two vertices b,
/// d and f pin every cycle edge, so step 1 always ends on the 6-cycle with
/// both chords in H, the cycle has no vertex of degree three, and step 2
/// has nothing to work with under any edge numbering.
#[test]
fn six_vertex_example_is_left_alone_under_every_edge_order() {
    let base = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 2), (0, 4)];
    for perm in permutations(base.len()) {
        let edges: Vec<Edge> = perm.iter().map(|&i| Edge::new(base[i].0, base[i].1, fap_core::Cost::Unit)).collect();
        let g = Instance::new(6, edges).unwrap();
        for mode in [Mode::TwoEc, Mode::TwoVc] {
            let (sol, report) = solve(&g, &SolveOptions::new(mode)).unwrap();
            assert_eq!(sol.cost(), 6);
            assert_eq!(report.pushes(), 0);
            assert!(report.blocks[0].events.is_empty());
        }
    }
}

#[test]
fn reverse_delete_order_and_protection() {
    let g = inst(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1), (0, 2, 1), (1, 3, 1)]);
    let full = Solution::full(&g);
    // the list is sorted before use
    let (a, ra) = reverse_delete(full.clone(), &[5, 4, 0], &[], Mode::TwoVc).unwrap();
    let (b, rb) = reverse_delete(full.clone(), &[0, 4, 5], &[], Mode::TwoVc).unwrap();
    assert_eq!((a, ra), (b, rb.clone()));
    // dropping (0,2) after (0,1) would leave vertex 0 with one edge
    assert_eq!(rb, vec![0]);
    // edges outside both lists are never touched
    let (c, _) = reverse_delete(full, &[], &[5], Mode::TwoVc).unwrap();
    assert_eq!(c.len(), 5);
}

#[test]
fn random_instances_in_both_modes() {
    for seed in 0..150 {
        let n = 5 + (seed as usize % 10);
        let g = gen_random(&GenParams::new(n, n / 2 + 1, 0.4, seed)).unwrap();
        let (ec, _) = solve(&g, &opts(Mode::TwoEc)).unwrap();
        let (vc, report) = solve(&g, &opts(Mode::TwoVc)).unwrap();
        assert!(brute_ok(&ec, Mode::TwoEc));
        assert!(brute_ok(&vc, Mode::TwoVc));
        assert!(blockwise_feasible(&vc, Mode::TwoVc));
        assert_eq!(replay(&g, &report).unwrap(), vc);
        // deterministic
        assert_eq!(solve(&g, &opts(Mode::TwoVc)).unwrap().1, report);
    }
}

#[test]
fn multi_block_instance() {
    // two triangles and a square sharing cut vertices 2 and 4
    let g = inst(
        8,
        &[(0, 1, 1), (1, 2, 0), (2, 0, 1), (2, 3, 1), (3, 4, 1), (4, 2, 1), (4, 5, 0), (5, 6, 1), (6, 7, 0), (7, 4, 1)],
    );
    for mode in [Mode::TwoEc, Mode::TwoVc] {
        let (sol, report) = solve(&g, &opts(mode)).unwrap();
        assert_eq!(report.blocks.len(), 3);
        assert_eq!(sol.len(), g.m());
        assert_eq!(sol.cost(), 7);
        assert!(blockwise_feasible(&sol, mode));
        assert_eq!(replay(&g, &report).unwrap(), sol);
    }
}
