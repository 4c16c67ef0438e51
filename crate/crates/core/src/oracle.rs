//! Exact minimum-cost feasible subgraphs for small instances.
//!
//! Both searches keep every zero-cost edge: adding an edge never breaks
//! feasibility and a zero-cost edge never adds cost, so some optimum
//! contains all of them. Only unit-cost edges are searched over.

use alloc::vec::Vec;

use thiserror::Error;

use crate::connectivity::Mode;
use crate::graph::{EdgeId, EdgeSet, Instance, Solution};

/// Largest number of unit edges [`opt_exhaustive`] accepts.
pub const EXHAUSTIVE_LIMIT: usize = 24;
/// Largest number of unit edges [`opt_bnb`] accepts.
pub const BNB_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{unit_edges} unit-cost edges exceed the oracle limit of {limit}")]
    TooLarge { unit_edges: usize, limit: usize },
    #[error("no feasible subgraph exists, even using every edge")]
    Infeasible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exhaustive,
    BranchAndBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptResult<'a> {
    pub opt_cost: u32,
    pub witness: Solution<'a>,
    /// Feasibility tests (exhaustive) or search nodes (branch and bound).
    pub explored: u64,
    pub method: Method,
}

/// Vertex degree deficits against the edges in `base`: each vertex needs two
/// incident edges in any feasible solution.
fn deficit(inst: &Instance, base: &EdgeSet) -> u32 {
    (0..inst.n())
        .map(|v| {
            let d = inst.adjacency(v).iter().filter(|&&(_, e)| base.contains(e)).count();
            2u32.saturating_sub(d as u32)
        })
        .sum()
}

fn zero_forest(inst: &Instance) -> EdgeSet {
    let mut s = inst.empty_set();
    for e in inst.zero_edges() {
        s.insert(e);
    }
    s
}

/// Minimum-cost feasible subgraph by trying subsets of the unit edges in
/// order of increasing size; the first feasible one is optimal.
pub fn opt_exhaustive(inst: &Instance, mode: Mode) -> Result<OptResult<'_>, OracleError> {
    let units: Vec<EdgeId> = inst.unit_edges().collect();
    let k = units.len();
    if k > EXHAUSTIVE_LIMIT {
        return Err(OracleError::TooLarge { unit_edges: k, limit: EXHAUSTIVE_LIMIT });
    }
    let base = zero_forest(inst);
    let mut all = base.clone();
    for &e in &units {
        all.insert(e);
    }
    if !Solution::new(inst, all).is_feasible(mode) {
        return Err(OracleError::Infeasible);
    }
    // each unit edge lowers the total deficit by at most two
    let lower = deficit(inst, &base).div_ceil(2) as usize;
    let mut explored = 0u64;
    for size in lower..=k {
        for mask in Subsets::new(k, size) {
            explored += 1;
            let mut set = base.clone();
            for (i, &e) in units.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    set.insert(e);
                }
            }
            let sol = Solution::new(inst, set);
            if sol.is_feasible(mode) {
                return Ok(OptResult { opt_cost: size as u32, witness: sol, explored, method: Method::Exhaustive });
            }
        }
    }
    unreachable!("the full unit edge set is feasible")
}

/// `k`-element subsets of `0..n` as bitmasks in increasing numeric order
/// (Gosper's hack).
struct Subsets {
    next: Option<u64>,
    limit: u64,
}

impl Subsets {
    fn new(n: usize, k: usize) -> Self {
        let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
        Subsets { next: (k <= n).then_some(first), limit: 1u64 << n }
    }
}

impl Iterator for Subsets {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let nxt = (((r ^ cur) >> 2) / c) | r;
            (nxt < self.limit).then_some(nxt)
        };
        Some(cur)
    }
}

/// Minimum-cost feasible subgraph by branch and bound over the unit edges.
///
/// A node fixes some unit edges in or out. It is pruned when the edges not
/// excluded are infeasible, or when the included cost plus half the
/// remaining degree deficit reaches the incumbent. Undecided edges whose
/// exclusion alone breaks feasibility are forced in before branching.
pub fn opt_bnb(inst: &Instance, mode: Mode) -> Result<OptResult<'_>, OracleError> {
    let units: Vec<EdgeId> = inst.unit_edges().collect();
    if units.len() > BNB_LIMIT {
        return Err(OracleError::TooLarge { unit_edges: units.len(), limit: BNB_LIMIT });
    }
    let base = zero_forest(inst);
    let mut upper = base.clone();
    for &e in &units {
        upper.insert(e);
    }
    let top = Solution::new(inst, upper.clone());
    if !top.is_feasible(mode) {
        return Err(OracleError::Infeasible);
    }
    let mut search = Bnb {
        inst,
        mode,
        units,
        best_cost: top.cost(),
        best: top.into_members(),
        explored: 0,
    };
    search.branch(base, upper);
    let witness = Solution::new(inst, search.best);
    Ok(OptResult { opt_cost: search.best_cost, witness, explored: search.explored, method: Method::BranchAndBound })
}

struct Bnb<'a> {
    inst: &'a Instance,
    mode: Mode,
    units: Vec<EdgeId>,
    best: EdgeSet,
    best_cost: u32,
    explored: u64,
}

impl Bnb<'_> {
    fn feasible(&self, set: &EdgeSet) -> bool {
        crate::connectivity::is_feasible(&crate::connectivity::EdgeView::new(self.inst, set), self.mode)
    }

    fn cost(&self, set: &EdgeSet) -> u32 {
        self.units.iter().filter(|&&e| set.contains(e)).count() as u32
    }

    /// `lower` holds the zero edges and included units; `upper` additionally
    /// holds the undecided units. `upper` is feasible on entry.
    fn branch(&mut self, mut lower: EdgeSet, mut upper: EdgeSet) {
        self.explored += 1;
        // force undecided edges the upper graph cannot lose
        loop {
            let mut forced = false;
            for i in 0..self.units.len() {
                let e = self.units[i];
                if lower.contains(e) || !upper.contains(e) {
                    continue;
                }
                upper.set(e, false);
                let ok = self.feasible(&upper);
                upper.insert(e);
                if !ok {
                    lower.insert(e);
                    forced = true;
                }
            }
            if !forced {
                break;
            }
        }
        let fixed = self.cost(&lower);
        if fixed >= self.best_cost {
            return;
        }
        if self.feasible(&lower) {
            self.best_cost = fixed;
            self.best = lower;
            return;
        }
        if fixed + deficit(self.inst, &lower).div_ceil(2) >= self.best_cost {
            return;
        }
        // branch on an undecided edge at the vertex with the largest deficit
        let Some(e) = self.pick(&lower, &upper) else {
            return;
        };
        let mut without = upper.clone();
        without.set(e, false);
        if self.feasible(&without) {
            self.branch(lower.clone(), without);
        }
        lower.insert(e);
        self.branch(lower, upper);
    }

    fn pick(&self, lower: &EdgeSet, upper: &EdgeSet) -> Option<EdgeId> {
        let inst = self.inst;
        let need = |v: usize| {
            let d = inst.adjacency(v).iter().filter(|&&(_, e)| lower.contains(e)).count();
            2usize.saturating_sub(d)
        };
        self.units
            .iter()
            .copied()
            .filter(|&e| upper.contains(e) && !lower.contains(e))
            .max_by_key(|&e| {
                let edge = inst.edge(e);
                (need(edge.u) + need(edge.v), core::cmp::Reverse(e))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::inst;

    fn cycle(n: usize) -> Instance {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
        inst(n, &edges)
    }

    #[test]
    fn subsets_enumerate_binomially() {
        assert_eq!(Subsets::new(5, 0).count(), 1);
        assert_eq!(Subsets::new(5, 2).count(), 10);
        assert_eq!(Subsets::new(5, 5).collect::<Vec<_>>(), alloc::vec![31]);
        assert_eq!(Subsets::new(3, 4).count(), 0);
        assert_eq!(Subsets::new(4, 2).collect::<Vec<_>>(), alloc::vec![3, 5, 6, 9, 10, 12]);
    }

    #[test]
    fn exhaustive_examples() {
        assert_eq!(opt_exhaustive(&cycle(4), Mode::TwoVc).unwrap().opt_cost, 4);
        let t = inst(3, &[(0, 1, 0), (1, 2, 0), (0, 2, 1)]);
        assert_eq!(opt_exhaustive(&t, Mode::TwoVc).unwrap().opt_cost, 1);
        let k4 = inst(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)]);
        let r = opt_exhaustive(&k4, Mode::TwoEc).unwrap();
        assert_eq!(r.opt_cost, 4);
        assert!(r.witness.is_feasible(Mode::TwoEc));
    }

    #[test]
    fn bnb_examples() {
        assert_eq!(opt_bnb(&cycle(6), Mode::TwoEc).unwrap().opt_cost, 6);
        let k4 = inst(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)]);
        assert_eq!(opt_bnb(&k4, Mode::TwoVc).unwrap().opt_cost, 4);
    }

    #[test]
    fn infeasible_and_too_large() {
        let p = inst(3, &[(0, 1, 1), (1, 2, 1)]);
        assert_eq!(opt_exhaustive(&p, Mode::TwoEc).unwrap_err(), OracleError::Infeasible);
        assert_eq!(opt_bnb(&p, Mode::TwoEc).unwrap_err(), OracleError::Infeasible);
        let big = cycle(25);
        assert_eq!(
            opt_exhaustive(&big, Mode::TwoEc).unwrap_err(),
            OracleError::TooLarge { unit_edges: 25, limit: EXHAUSTIVE_LIMIT }
        );
        assert_eq!(opt_bnb(&big, Mode::TwoEc).unwrap().opt_cost, 25);
    }
}
