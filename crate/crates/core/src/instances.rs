//! Seeded random instances, closed-form families, the exhaustive small
//! corpus and the worst-ratio search.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::connectivity::Mode;
use crate::graph::{Cost, DisjointSets, Edge, EdgeId, Instance, Solution};
use crate::oracle::{opt_bnb, OracleError};
use crate::solver::{solve, SolveError, SolveOptions};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    ParamsInvalid(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub n: usize,
    /// Chords added on top of the Hamiltonian cycle.
    pub extra_edges: usize,
    /// Target share of zero-cost edges; capped by acyclicity at `n - 1` edges.
    pub zero_fraction: f64,
    pub seed: u64,
    pub mode: Mode,
}

impl GenParams {
    pub fn new(n: usize, extra_edges: usize, zero_fraction: f64, seed: u64) -> Self {
        GenParams { n, extra_edges, zero_fraction, seed, mode: Mode::default() }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        GenParams { seed, ..self }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n < 3 {
            return Err(GenError::ParamsInvalid("n must be at least 3"));
        }
        if self.extra_edges > self.n * (self.n - 3) / 2 {
            return Err(GenError::ParamsInvalid("more chords than a complete graph has"));
        }
        if !(0.0..=1.0).contains(&self.zero_fraction) {
            return Err(GenError::ParamsInvalid("zero_fraction must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// A random Hamiltonian cycle plus `extra_edges` distinct random chords,
/// with a random acyclic subset of edges marked zero-cost. Edges are listed
/// by ascending `(min, max)` endpoint pair.
pub fn gen_random(p: &GenParams) -> Result<Instance, GenError> {
    p.validate()?;
    let n = p.n;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut adjacent = vec![false; n * n];
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n + p.extra_edges);
    for i in 0..n {
        let (a, b) = (order[i], order[(i + 1) % n]);
        let (a, b) = (a.min(b), a.max(b));
        adjacent[a * n + b] = true;
        pairs.push((a, b));
    }
    let mut chords: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !adjacent[a * n + b])
        .collect();
    chords.shuffle(&mut rng);
    pairs.extend_from_slice(&chords[..p.extra_edges]);
    pairs.sort_unstable();

    let m = pairs.len();
    let target = (p.zero_fraction * m as f64 + 0.5) as usize;
    let mut candidates: Vec<usize> = (0..m).collect();
    candidates.shuffle(&mut rng);
    let mut zero = vec![false; m];
    let mut forest = DisjointSets::new(n);
    let mut chosen = 0;
    for i in candidates {
        if chosen >= target {
            break;
        }
        let (a, b) = pairs[i];
        if forest.union(a, b) {
            zero[i] = true;
            chosen += 1;
        }
    }
    let edges = pairs
        .iter()
        .zip(&zero)
        .map(|(&(a, b), &z)| Edge::new(a, b, if z { Cost::Zero } else { Cost::Unit }))
        .collect();
    Ok(Instance::new(n, edges).expect("generator output is valid"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `C_k`, all unit. `k >= 3`.
    Cycle,
    /// Two vertices joined by three internally disjoint paths of `k + 1`
    /// unit edges each. `k >= 1`.
    Theta,
    /// Hub `0` with zero-cost spokes to the unit rim cycle `1..=k`. The
    /// spokes form a spanning star. `k >= 3`.
    Wheel,
    /// Zero-cost path `0 - 1 - ... - (k-1)` with unit edges `(i, i+2)` and
    /// `(0, k-1)`. `k >= 3`.
    TapPath,
    /// Unit cycle on `2k` vertices with zero-cost chords `(i, i+k)`, a
    /// perfect matching. `k >= 2`.
    MapMatching,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Cycle, Family::Theta, Family::Wheel, Family::TapPath, Family::MapMatching];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cycle => "cycle",
            Family::Theta => "theta",
            Family::Wheel => "wheel",
            Family::TapPath => "tap_path",
            Family::MapMatching => "map_matching",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }

    fn min_k(self) -> usize {
        match self {
            Family::Cycle | Family::Wheel | Family::TapPath => 3,
            Family::Theta => 1,
            Family::MapMatching => 2,
        }
    }
}

pub fn gen_family(family: Family, k: usize) -> Result<Instance, GenError> {
    if k < family.min_k() {
        return Err(GenError::ParamsInvalid("k too small for this family"));
    }
    let unit = |a, b| Edge::new(a, b, Cost::Unit);
    let zero = |a, b| Edge::new(a, b, Cost::Zero);
    let (n, edges): (usize, Vec<Edge>) = match family {
        Family::Cycle => (k, (0..k).map(|i| unit(i, (i + 1) % k)).collect()),
        Family::Theta => {
            let mut edges = Vec::new();
            let mut next = 2;
            for _ in 0..3 {
                let mut prev = 0;
                for _ in 0..k {
                    edges.push(unit(prev, next));
                    prev = next;
                    next += 1;
                }
                edges.push(unit(prev, 1));
            }
            (next, edges)
        }
        Family::Wheel => {
            let mut edges: Vec<Edge> = (1..=k).map(|i| zero(0, i)).collect();
            edges.extend((1..=k).map(|i| unit(i, i % k + 1)));
            (k + 1, edges)
        }
        Family::TapPath => {
            let mut edges: Vec<Edge> = (0..k - 1).map(|i| zero(i, i + 1)).collect();
            edges.extend((0..k - 2).map(|i| unit(i, i + 2)));
            if k > 3 {
                edges.push(unit(0, k - 1));
            }
            (k, edges)
        }
        Family::MapMatching => {
            let n = 2 * k;
            let mut edges: Vec<Edge> = (0..n).map(|i| unit(i, (i + 1) % n)).collect();
            edges.extend((0..k).map(|i| zero(i, i + k)));
            (n, edges)
        }
    };
    Ok(Instance::new(n, edges).expect("family instances are valid"))
}

/// The deterministic small corpus used for oracle cross-checks:
///
/// * every 2-connected labelled graph on 3, 4 or 5 vertices, under every
///   cost labelling whose zero-cost edges form a forest;
/// * for 6, 7 and 8 vertices, the cycle `0..n` plus every set of at most
///   three chords, each labelled all-unit, with the path `0 - .. - (n-1)`
///   zero-cost, and with the alternate cycle edges `(2i, 2i+1)` zero-cost.
pub fn exhaustive_corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 3..=5 {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let chosen: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            let all_unit: Vec<Edge> = chosen.iter().map(|&(a, b)| Edge::new(a, b, Cost::Unit)).collect();
            let shape = Instance::new(n, all_unit).expect("simple graph");
            if !Solution::full(&shape).is_feasible(Mode::TwoVc) {
                continue;
            }
            for zmask in 0u32..(1 << chosen.len()) {
                let edges = chosen
                    .iter()
                    .enumerate()
                    .map(|(i, &(a, b))| {
                        Edge::new(a, b, if zmask >> i & 1 == 1 { Cost::Zero } else { Cost::Unit })
                    })
                    .collect();
                if let Ok(inst) = Instance::new(n, edges) {
                    out.push(inst);
                }
            }
        }
    }
    for n in 6..=8 {
        let cycle: Vec<(usize, usize)> = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect();
        let chords: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 2..n).map(move |b| (a, b)))
            .filter(|&(a, b)| !(a == 0 && b == n - 1))
            .collect();
        let mut sets: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for i in 0..chords.len() {
            sets.push(vec![chords[i]]);
            for j in i + 1..chords.len() {
                sets.push(vec![chords[i], chords[j]]);
                for k in j + 1..chords.len() {
                    sets.push(vec![chords[i], chords[j], chords[k]]);
                }
            }
        }
        for extra in sets {
            let mut pairs = cycle.clone();
            pairs.extend(extra);
            pairs.sort_unstable();
            let labellings: [&dyn Fn(usize, usize) -> bool; 3] = [
                &|_, _| false,
                &|a, b| b == a + 1,
                &|a, b| b == a + 1 && a % 2 == 0,
            ];
            for zero in labellings {
                let edges = pairs
                    .iter()
                    .map(|&(a, b)| Edge::new(a, b, if zero(a, b) { Cost::Zero } else { Cost::Unit }))
                    .collect();
                out.push(Instance::new(n, edges).expect("corpus instance"));
            }
        }
    }
    out
}

/// Seed of trial `index` in a search seeded with `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

/// Outcome of one search trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trial {
    pub index: u64,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub zero_edges: usize,
    pub alg_cost: u32,
    pub opt_cost: u32,
    pub alg_edges: Vec<EdgeId>,
    pub opt_edges: Vec<EdgeId>,
}

impl Trial {
    /// Compares `alg/opt` ratios exactly.
    pub fn cmp_ratio(&self, other: &Trial) -> Ordering {
        (u64::from(self.alg_cost) * u64::from(other.opt_cost)).cmp(&(u64::from(other.alg_cost) * u64::from(self.opt_cost)))
    }

    /// `alg/opt > 3/2`.
    pub fn exceeds_three_halves(&self) -> bool {
        2 * self.alg_cost > 3 * self.opt_cost
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TrialError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Generates, solves and oracles trial `index` of a search.
pub fn run_trial(p: &GenParams, index: u64) -> Result<(Instance, Trial), TrialError> {
    let seed = trial_seed(p.seed, index);
    let inst = gen_random(&p.with_seed(seed))?;
    let trial = {
        let (alg, _) = solve(&inst, &SolveOptions::new(p.mode))?;
        let opt = opt_bnb(&inst, p.mode)?;
        Trial {
            index,
            seed,
            n: inst.n(),
            m: inst.m(),
            zero_edges: inst.zero_edges().count(),
            alg_cost: alg.cost(),
            opt_cost: opt.opt_cost,
            alg_edges: alg.edge_ids().collect(),
            opt_edges: opt.witness.edge_ids().collect(),
        }
    };
    Ok((inst, trial))
}

/// Picks the trial with the largest ratio; ties go to the smaller index, so
/// the choice does not depend on evaluation order.
pub fn worse(a: Trial, b: Trial) -> Trial {
    match a.cmp_ratio(&b) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal if a.index <= b.index => a,
        Ordering::Equal => b,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub worst: Trial,
    pub instance: Instance,
    pub trials: Vec<Trial>,
}

/// Runs `trials` seeded trials and returns the one with the largest
/// `alg/opt`. Every ratio is oracle-verified.
pub fn worst_case_search(p: &GenParams, trials: u64) -> Result<SearchResult, TrialError> {
    p.validate()?;
    let mut all = Vec::with_capacity(trials as usize);
    for i in 0..trials {
        all.push(run_trial(p, i)?.1);
    }
    let worst = all.iter().cloned().reduce(worse).ok_or(GenError::ParamsInvalid("at least one trial is needed"))?;
    let instance = gen_random(&p.with_seed(worst.seed))?;
    Ok(SearchResult { worst, instance, trials: all })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_are_validated() {
        assert!(gen_random(&GenParams::new(2, 0, 0.0, 1)).is_err());
        assert!(gen_random(&GenParams::new(5, 6, 0.0, 1)).is_err());
        assert!(gen_random(&GenParams::new(5, 5, 1.5, 1)).is_err());
        assert!(gen_random(&GenParams::new(5, 5, f64::NAN, 1)).is_err());
    }

    #[test]
    fn c4_without_zero_edges() {
        let g = gen_random(&GenParams::new(4, 0, 0.0, 7)).unwrap();
        assert_eq!(g.m(), 4);
        assert_eq!(g.unit_count(), 4);
        assert!(Solution::full(&g).is_feasible(Mode::TwoVc));
    }

    #[test]
    fn complete_graph_gets_spanning_zero_tree() {
        let g = gen_random(&GenParams::new(5, 5, 1.0, 3)).unwrap();
        assert_eq!(g.m(), 10);
        assert_eq!(g.zero_edges().count(), 4);
    }

    #[test]
    fn generator_is_deterministic() {
        let p = GenParams::new(8, 4, 0.5, 42);
        assert_eq!(gen_random(&p).unwrap(), gen_random(&p).unwrap());
        assert_ne!(gen_random(&p).unwrap(), gen_random(&p.with_seed(43)).unwrap());
    }

    #[test]
    fn families() {
        let c5 = gen_family(Family::Cycle, 5).unwrap();
        assert_eq!((c5.n(), c5.m(), c5.unit_count()), (5, 5, 5));
        let tap = gen_family(Family::TapPath, 3).unwrap();
        assert_eq!(tap.zero_edges().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(tap.m(), 3);
        let map = gen_family(Family::MapMatching, 4).unwrap();
        assert_eq!(map.n(), 8);
        assert_eq!(map.zero_edges().count(), 4);
        let theta = gen_family(Family::Theta, 2).unwrap();
        assert_eq!((theta.n(), theta.m()), (8, 9));
        let wheel = gen_family(Family::Wheel, 5).unwrap();
        assert_eq!((wheel.n(), wheel.m(), wheel.unit_count()), (6, 10, 5));
        for f in Family::ALL {
            for k in f.min_k()..f.min_k() + 4 {
                let g = gen_family(f, k).unwrap();
                assert!(Solution::full(&g).is_feasible(Mode::TwoVc), "{} {}", f.name(), k);
            }
            assert!(gen_family(f, f.min_k() - 1).is_err());
            assert_eq!(Family::parse(f.name()), Some(f));
        }
    }

    #[test]
    fn ratio_ordering() {
        let t = |index, alg, opt| Trial {
            index,
            seed: 0,
            n: 0,
            m: 0,
            zero_edges: 0,
            alg_cost: alg,
            opt_cost: opt,
            alg_edges: Vec::new(),
            opt_edges: Vec::new(),
        };
        assert_eq!(worse(t(0, 4, 4), t(1, 5, 4)).index, 1);
        assert_eq!(worse(t(3, 5, 4), t(1, 10, 8)).index, 1);
        assert!(t(0, 7, 4).exceeds_three_halves());
        assert!(!t(0, 6, 4).exceeds_three_halves());
    }
}
