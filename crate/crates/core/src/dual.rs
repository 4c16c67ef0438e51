//! Exact checker for the dual of the cut-covering LP.
//!
//! Primal: minimise `sum c(e) x_e` subject to `x(delta(S)) >= 2` for every
//! proper non-empty vertex set `S` and `0 <= x <= 1`. Dual: maximise
//! `2 sum y_S - sum z_e` subject to `sum_{S: e in delta(S)} y_S <= c(e) + z_e`
//! for every edge and `y, z >= 0`. Any feasible dual value is a lower bound
//! on the cost of every 2-edge-connected spanning subgraph.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::connectivity::Mode;
use crate::graph::{Cost, EdgeId, Instance, Solution, VertexId};
use crate::segments::special_segments;

/// Exact rational used for dual values.
pub type Rational = Ratio<i64>;

/// Largest number of stored vertex sets per dual.
pub const MAX_SETS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DualError {
    #[error("vertex set {index} is empty, covers every vertex or names a vertex outside 0..n")]
    MalformedSet { index: usize },
    #[error("dual value {value} is negative or its denominator is not a power of two")]
    BadValue { value: Rational },
    #[error("too many vertex sets (limit {MAX_SETS})")]
    TooManySets,
    #[error("weak duality needs a feasible dual and a feasible 2-edge-connected solution")]
    PreconditionUnmet,
}

/// Sparse dual solution: `y` over explicit vertex sets, `z` over edge ids.
/// Zero entries are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DualSolution {
    y: BTreeMap<Vec<VertexId>, Rational>,
    z: BTreeMap<EdgeId, Rational>,
}

fn check_value(value: Rational) -> Result<(), DualError> {
    let d = *value.denom();
    if value < Rational::zero() || d <= 0 || d & (d - 1) != 0 {
        return Err(DualError::BadValue { value });
    }
    Ok(())
}

impl DualSolution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `y_S`. The set is sorted and deduplicated; a zero value erases it.
    pub fn set_y(&mut self, set: impl IntoIterator<Item = VertexId>, value: Rational) -> Result<(), DualError> {
        check_value(value)?;
        let mut key: Vec<VertexId> = set.into_iter().collect();
        key.sort_unstable();
        key.dedup();
        if value.is_zero() {
            self.y.remove(&key);
            return Ok(());
        }
        if !self.y.contains_key(&key) && self.y.len() >= MAX_SETS {
            return Err(DualError::TooManySets);
        }
        self.y.insert(key, value);
        Ok(())
    }

    pub fn set_z(&mut self, edge: EdgeId, value: Rational) -> Result<(), DualError> {
        check_value(value)?;
        if value.is_zero() {
            self.z.remove(&edge);
        } else {
            self.z.insert(edge, value);
        }
        Ok(())
    }

    pub fn y(&self) -> impl Iterator<Item = (&[VertexId], Rational)> {
        self.y.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn z(&self) -> impl Iterator<Item = (EdgeId, Rational)> + '_ {
        self.z.iter().map(|(&k, &v)| (k, v))
    }

    pub fn y_of(&self, set: &[VertexId]) -> Rational {
        self.y.get(set).copied().unwrap_or_else(Rational::zero)
    }

    pub fn z_of(&self, edge: EdgeId) -> Rational {
        self.z.get(&edge).copied().unwrap_or_else(Rational::zero)
    }

    /// Multiplies every value by `factor`, which must be a non-negative
    /// dyadic rational.
    pub fn scaled(&self, factor: Rational) -> Result<DualSolution, DualError> {
        check_value(factor)?;
        let mut out = DualSolution::new();
        for (k, &v) in &self.y {
            out.set_y(k.iter().copied(), v * factor)?;
        }
        for (&e, &v) in &self.z {
            out.set_z(e, v * factor)?;
        }
        Ok(out)
    }
}

/// An edge constraint that does not hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub edge: EdgeId,
    /// `sum y_S` over the stored sets the edge crosses.
    pub load: Rational,
    /// `c(e) + z_e`.
    pub capacity: Rational,
}

impl Violation {
    /// Negative by construction.
    pub fn slack(&self) -> Rational {
        self.capacity - self.load
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCheck {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// Per-edge load `sum_{S: e in delta(S)} y_S`.
fn loads(inst: &Instance, d: &DualSolution) -> Result<Vec<Rational>, DualError> {
    let n = inst.n();
    let mut load = vec![Rational::zero(); inst.m()];
    let mut inside = FixedBitSet::with_capacity(n);
    for (index, (set, &value)) in d.y.iter().enumerate() {
        if set.is_empty() || set.len() >= n || set.iter().any(|&v| v >= n) {
            return Err(DualError::MalformedSet { index });
        }
        inside.clear();
        for &v in set {
            inside.insert(v);
        }
        for (e, edge) in inst.edges().iter().enumerate() {
            if inside.contains(edge.u) != inside.contains(edge.v) {
                load[e] += value;
            }
        }
    }
    Ok(load)
}

/// Checks every edge constraint exactly and lists the violated ones.
pub fn check_feasible(inst: &Instance, d: &DualSolution) -> Result<DualCheck, DualError> {
    let load = loads(inst, d)?;
    let violations: Vec<Violation> = (0..inst.m())
        .filter_map(|e| {
            let capacity = Rational::from_integer(i64::from(inst.cost(e).value())) + d.z_of(e);
            (load[e] > capacity).then(|| Violation { edge: e, load: load[e], capacity })
        })
        .collect();
    Ok(DualCheck { feasible: violations.is_empty(), violations })
}

/// `2 sum y_S - sum z_e`.
pub fn objective(d: &DualSolution) -> Rational {
    let two = Rational::from_integer(2);
    let y: Rational = d.y.values().copied().sum();
    let z: Rational = d.z.values().copied().sum();
    two * y - z
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeakDuality {
    pub objective: Rational,
    pub cost: u32,
    pub holds: bool,
}

/// Compares the dual objective with the cost of a feasible solution.
pub fn weak_duality_check(inst: &Instance, d: &DualSolution, sol: &Solution<'_>) -> Result<WeakDuality, DualError> {
    let check = check_feasible(inst, d)?;
    if !check.feasible || !sol.is_feasible(Mode::TwoEc) {
        return Err(DualError::PreconditionUnmet);
    }
    let objective = objective(d);
    let cost = sol.cost();
    Ok(WeakDuality { objective, cost, holds: objective <= Rational::from_integer(i64::from(cost)) })
}

/// A singleton `y` value lowered to keep an edge outside the solution
/// feasible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Clamp {
    pub vertex: VertexId,
    pub edge: EdgeId,
    pub from: Rational,
    pub to: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingletonDual {
    pub dual: DualSolution,
    pub clamps: Vec<Clamp>,
}

/// Initial singleton dual assignment for a feasible solution.
///
/// Side vertices of special segments get `y = 1`; every other vertex of
/// degree two gets `1/2` when one of its solution edges is unit-cost and `0`
/// otherwise; high-degree vertices get `0`. Edges outside the solution whose
/// endpoint values add up to more than their cost are repaired by lowering
/// the larger endpoint value in steps of 1/2 (each step is reported). Finally
/// every solution edge gets `z_e = max(0, load - c(e))`, the least value that
/// keeps it feasible. In the unclamped case this matches the incremental `z`
/// rule: `+1` on zero-cost edges at a special side vertex, `+1/2` on the
/// zero-cost edge of a half-valued vertex.
pub fn singleton_dual(sol: &Solution<'_>, mode: Mode) -> SingletonDual {
    let inst = sol.instance();
    let n = inst.n();
    let half = Rational::new(1, 2);
    let one = Rational::one();
    let mut y = vec![Rational::zero(); n];

    let mut special_side = FixedBitSet::with_capacity(n);
    for s in special_segments(sol, mode) {
        let (a, b) = s.side_vertices();
        special_side.insert(a);
        special_side.insert(b);
    }
    for (v, yv) in y.iter_mut().enumerate() {
        *yv = if special_side.contains(v) {
            one
        } else if sol.degree(v) >= 3 {
            Rational::zero()
        } else if sol.incident(v).any(|(_, e)| inst.cost(e) == Cost::Unit) {
            half
        } else {
            Rational::zero()
        };
    }

    let mut clamps = Vec::new();
    for (e, edge) in inst.edges().iter().enumerate() {
        if sol.contains(e) {
            continue;
        }
        let cap = Rational::from_integer(i64::from(edge.cost.value()));
        while y[edge.u] + y[edge.v] > cap {
            // lower the larger value; ties go to the larger vertex id
            let (a, b) = (edge.u, edge.v);
            let v = if y[a] > y[b] || (y[a] == y[b] && a > b) { a } else { b };
            let from = y[v];
            y[v] = from - half;
            clamps.push(Clamp { vertex: v, edge: e, from, to: y[v] });
        }
    }

    let mut dual = DualSolution::new();
    for (v, &value) in y.iter().enumerate() {
        dual.set_y([v], value).expect("dyadic value");
    }
    for e in sol.edge_ids() {
        let edge = inst.edge(e);
        let excess = y[edge.u] + y[edge.v] - Rational::from_integer(i64::from(edge.cost.value()));
        if excess > Rational::zero() {
            dual.set_z(e, excess).expect("dyadic value");
        }
    }
    SingletonDual { dual, clamps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::inst;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn c4() -> Instance {
        inst(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    }

    #[test]
    fn c4_half_singletons() {
        let g = c4();
        let mut d = DualSolution::new();
        for v in 0..4 {
            d.set_y([v], q(1, 2)).unwrap();
        }
        assert!(check_feasible(&g, &d).unwrap().feasible);
        assert_eq!(objective(&d), q(4, 1));
        let w = weak_duality_check(&g, &d, &Solution::full(&g)).unwrap();
        assert!(w.holds);
        assert_eq!(w.objective, q(4, 1));
    }

    #[test]
    fn overloaded_edge_is_reported() {
        let g = inst(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]);
        let mut d = DualSolution::new();
        d.set_y([0], q(1, 1)).unwrap();
        d.set_y([1], q(1, 1)).unwrap();
        let check = check_feasible(&g, &d).unwrap();
        assert!(!check.feasible);
        assert_eq!(check.violations.len(), 1);
        assert_eq!(check.violations[0].edge, 0);
        assert_eq!(check.violations[0].slack(), q(-1, 1));
    }

    #[test]
    fn empty_dual() {
        let g = c4();
        let d = DualSolution::new();
        assert!(check_feasible(&g, &d).unwrap().feasible);
        assert_eq!(objective(&d), q(0, 1));
        assert!(weak_duality_check(&g, &d, &Solution::full(&g)).unwrap().holds);
    }

    #[test]
    fn objective_with_z() {
        let mut d = DualSolution::new();
        d.set_y([0, 1], q(1, 2)).unwrap();
        d.set_z(3, q(1, 2)).unwrap();
        assert_eq!(objective(&d), q(1, 2));
    }

    #[test]
    fn malformed_sets_and_values() {
        let g = c4();
        let mut d = DualSolution::new();
        d.set_y([0, 1, 2, 3], q(1, 2)).unwrap();
        assert_eq!(check_feasible(&g, &d).unwrap_err(), DualError::MalformedSet { index: 0 });
        let mut d = DualSolution::new();
        d.set_y(core::iter::empty(), q(1, 2)).unwrap();
        assert!(matches!(check_feasible(&g, &d), Err(DualError::MalformedSet { .. })));
        assert!(matches!(d.set_y([1], q(1, 3)), Err(DualError::BadValue { .. })));
        assert!(matches!(d.set_z(1, q(-1, 2)), Err(DualError::BadValue { .. })));
    }

    #[test]
    fn weak_duality_needs_feasible_inputs() {
        let g = c4();
        let mut d = DualSolution::new();
        d.set_y([0], q(2, 1)).unwrap();
        assert_eq!(
            weak_duality_check(&g, &d, &Solution::full(&g)).unwrap_err(),
            DualError::PreconditionUnmet
        );
        let mut broken = Solution::full(&g);
        broken.remove(0);
        assert_eq!(
            weak_duality_check(&g, &DualSolution::new(), &broken).unwrap_err(),
            DualError::PreconditionUnmet
        );
    }

    #[test]
    fn singleton_dual_on_cycle() {
        let edges: alloc::vec::Vec<_> = (0..7).map(|i| (i, (i + 1) % 7, 1)).collect();
        let g = inst(7, &edges);
        let s = singleton_dual(&Solution::full(&g), Mode::TwoVc);
        assert!(s.clamps.is_empty());
        assert!((0..7).all(|v| s.dual.y_of(&[v]) == q(1, 2)));
        assert!(check_feasible(&g, &s.dual).unwrap().feasible);
        assert_eq!(objective(&s.dual), q(7, 1));
    }

    #[test]
    fn singleton_dual_weak_unit_zero_segment() {
        // bowtie on 0 plus the weak path 1-5-3 with edges (unit, zero)
        let g = inst(
            6,
            &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (0, 3, 1), (3, 4, 1), (4, 0, 1), (1, 5, 1), (5, 3, 0)],
        );
        let s = singleton_dual(&Solution::full(&g), Mode::TwoVc);
        assert_eq!(s.dual.y_of(&[5]), q(1, 2));
        assert_eq!(s.dual.z_of(7), q(1, 2));
        assert_eq!(s.dual.y_of(&[0]), q(0, 1));
        assert!(check_feasible(&g, &s.dual).unwrap().feasible);
    }

    #[test]
    fn singleton_dual_special_side_vertex() {
        // C4 + chord (0,2); segment 0-1-2 has edges unit, zero and is special
        let g = inst(4, &[(0, 1, 1), (1, 2, 0), (2, 3, 1), (3, 0, 1), (0, 2, 1)]);
        let s = singleton_dual(&Solution::full(&g), Mode::TwoVc);
        assert_eq!(s.dual.y_of(&[1]), q(1, 1));
        assert_eq!(s.dual.z_of(1), q(1, 1));
        // 0-3-2 is special too
        assert_eq!(s.dual.y_of(&[3]), q(1, 1));
        assert!(check_feasible(&g, &s.dual).unwrap().feasible);
        // 2*(1 + 1) - 1
        assert_eq!(objective(&s.dual), q(3, 1));
    }

    #[test]
    fn singleton_dual_all_zero_solution_edges() {
        // the only cycle has two zero edges and one unit edge; vertex 1 sits
        // between two zero edges
        let g = inst(3, &[(0, 1, 0), (1, 2, 0), (0, 2, 1)]);
        let s = singleton_dual(&Solution::full(&g), Mode::TwoVc);
        assert_eq!(s.dual.y_of(&[1]), q(0, 1));
        assert!(check_feasible(&g, &s.dual).unwrap().feasible);
    }

    #[test]
    fn singleton_dual_clamps_outside_edges() {
        // solution C4 (ids 0..3) in K4; chords 4 and 5 are unit and join two
        // half-valued vertices, which is fine; make the chord zero-cost and it
        // must be clamped.
        let g = inst(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1), (0, 2, 0)]);
        let sol = Solution::from_edges(&g, [0, 1, 2, 3]);
        let s = singleton_dual(&sol, Mode::TwoVc);
        assert_eq!(s.clamps.len(), 2);
        assert_eq!(s.clamps[0].vertex, 2);
        assert_eq!(s.clamps[1].vertex, 0);
        assert!(check_feasible(&g, &s.dual).unwrap().feasible);
    }
}
