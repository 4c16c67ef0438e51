mod common;

use fap_core::dual::{check_feasible, objective, singleton_dual, weak_duality_check, DualError, DualSolution, Rational};
use fap_core::instances::{exhaustive_corpus, gen_random, GenParams};
use fap_core::oracle::opt_exhaustive;
use fap_core::{solve, Instance, Mode, SolveOptions};
use proptest::prelude::*;

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a, b)
}

#[test]
fn singleton_dual_bounds_the_optimum_on_the_corpus() {
    let mut clamped = 0;
    for (i, g) in exhaustive_corpus().iter().enumerate() {
        if i % 5 != 0 {
            continue;
        }
        for mode in [Mode::TwoEc, Mode::TwoVc] {
            let (sol, _) = solve(g, &SolveOptions::new(mode)).unwrap();
            let built = singleton_dual(&sol, mode);
            clamped += usize::from(!built.clamps.is_empty());
            let check = check_feasible(g, &built.dual).unwrap();
            assert!(check.feasible, "{:?}", check.violations);
            let opt = opt_exhaustive(g, Mode::TwoEc).unwrap().opt_cost;
            let obj = objective(&built.dual);
            assert!(obj <= Rational::from_integer(opt.into()), "objective {obj} above opt {opt}");
            assert!(opt <= sol.cost());
            assert!(weak_duality_check(g, &built.dual, &sol).unwrap().holds);
            for c in &built.clamps {
                assert_eq!(c.from - c.to, q(1, 2));
                assert!(!sol.contains(c.edge));
            }
        }
    }
    assert!(clamped > 0, "no corpus instance exercised the clamp");
}

/// Loads recomputed edge by edge from the set list, as an independent check.
fn brute_violations(g: &Instance, d: &DualSolution) -> Vec<usize> {
    (0..g.m())
        .filter(|&e| {
            let edge = g.edge(e);
            let load: Rational = d
                .y()
                .filter(|(s, _)| s.contains(&edge.u) != s.contains(&edge.v))
                .map(|(_, v)| v)
                .sum();
            load > Rational::from_integer(edge.cost.value().into()) + d.z_of(e)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_duals_checked_exactly(
        seed in 0u64..1000,
        sets in proptest::collection::vec((1u32..255, 0i64..8), 0..12),
        zs in proptest::collection::vec((0usize..64, 0i64..4), 0..6),
        factor in 0i64..9,
    ) {
        let g = gen_random(&GenParams::new(8, 4, 0.5, seed)).unwrap();
        let mut d = DualSolution::new();
        for (mask, v) in sets {
            let members: Vec<usize> = (0..8).filter(|b| mask >> b & 1 == 1).collect();
            d.set_y(members, q(v, 4)).unwrap();
        }
        for (e, v) in zs {
            d.set_z(e % g.m(), q(v, 2)).unwrap();
        }
        let check = check_feasible(&g, &d).unwrap();
        let found: Vec<usize> = check.violations.iter().map(|v| v.edge).collect();
        prop_assert_eq!(&found, &brute_violations(&g, &d));
        prop_assert_eq!(check.feasible, found.is_empty());

        let f = q(factor, 4);
        let s = d.scaled(f).unwrap();
        prop_assert_eq!(objective(&s), objective(&d) * f);
        for (set, v) in d.y() {
            prop_assert_eq!(s.y_of(set), v * f);
        }
        if check.feasible && factor <= 4 {
            prop_assert!(check_feasible(&g, &s).unwrap().feasible);
        }
    }
}

#[test]
fn rejects_bad_values_and_sets() {
    let g = common::inst(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]);
    let mut d = DualSolution::new();
    assert!(matches!(d.set_y([0], q(1, 3)), Err(DualError::BadValue { .. })));
    assert!(matches!(d.set_y([0], q(-1, 2)), Err(DualError::BadValue { .. })));
    d.set_y([0, 1, 2, 3], q(1, 2)).unwrap();
    assert!(matches!(check_feasible(&g, &d), Err(DualError::MalformedSet { index: 0 })));
    assert!(d.scaled(q(1, 3)).is_err());
}
