//! Batch experiments: manifests, per-instance evaluation rows, the parallel
//! worst-ratio search and persistence of ratio violations.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use fap_core::dual::{check_feasible, objective, singleton_dual, Rational};
use fap_core::instances::{gen_random, run_trial, worse, GenParams, Trial, TrialError};
use fap_core::oracle::{opt_bnb, OracleError};
use fap_core::{solve, Instance, Mode, Solution, SolveError, SolveOptions};
use rayon::prelude::*;
use thiserror::Error;

use crate::format::{format_rational, join_ids, write_instance, ParseError};
use crate::trace::write_trace;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("manifest line {line}: {reason}")]
    Manifest { line: usize, reason: String },
    #[error(transparent)]
    Trial(#[from] TrialError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// `alg/opt` as a reduced fraction and a 6-digit decimal.
pub fn ratio_fields(alg: u32, opt: u32) -> (String, String) {
    let r = Rational::new(i64::from(alg), i64::from(opt));
    (format_rational(r), format!("{:.6}", f64::from(alg) / f64::from(opt)))
}

/// One manifest row: generator parameters for a single instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManifestRow {
    pub n: usize,
    pub extra_edges: usize,
    pub zero_fraction: f64,
    pub seed: u64,
}

/// Manifest lines are `n,extra_edges,zero_fraction,seed`. `#` comments,
/// blank lines and a header line starting with `n,` are skipped.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRow>, HarnessError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("n,") {
            continue;
        }
        let bad = |reason: &str| HarnessError::Manifest { line: i + 1, reason: reason.to_string() };
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let [n, extra, zf, seed] = f.as_slice() else {
            return Err(bad("expected n,extra_edges,zero_fraction,seed"));
        };
        let row = ManifestRow {
            n: n.parse().map_err(|_| bad("bad n"))?,
            extra_edges: extra.parse().map_err(|_| bad("bad extra_edges"))?,
            zero_fraction: zf.parse().map_err(|_| bad("bad zero_fraction"))?,
            seed: seed.parse().map_err(|_| bad("bad seed"))?,
        };
        GenParams::new(row.n, row.extra_edges, row.zero_fraction, row.seed)
            .validate()
            .map_err(|e| bad(&e.to_string()))?;
        rows.push(row);
    }
    Ok(rows)
}

pub const BATCH_HEADER: &str = "row,seed,n,m,m0,alg_cost,opt_cost,ratio,ratio_decimal,dual_objective,dual_clamps,mode";

/// Evaluation of one instance: algorithm, oracle and singleton dual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub n: usize,
    pub m: usize,
    pub zero_edges: usize,
    pub alg_cost: u32,
    pub alg_edges: Vec<usize>,
    /// `None` when the instance is too large for the oracle.
    pub opt: Option<(u32, Vec<usize>)>,
    pub dual_objective: Rational,
    pub dual_clamps: usize,
    pub trace: String,
}

impl Evaluation {
    pub fn violates(&self) -> bool {
        self.opt.as_ref().is_some_and(|(opt, _)| 2 * self.alg_cost > 3 * opt)
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("the singleton dual is infeasible")]
    DualInfeasible,
}

pub fn evaluate(inst: &Instance, mode: Mode, check_each_step: bool) -> Result<Evaluation, EvalError> {
    let (sol, report) = solve(inst, &SolveOptions { mode, check_each_step })?;
    let opt = match opt_bnb(inst, mode) {
        Ok(r) => Some((r.opt_cost, r.witness.edge_ids().collect())),
        Err(OracleError::TooLarge { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let dual = singleton_dual(&sol, mode);
    let check = check_feasible(inst, &dual.dual).expect("singleton sets are proper");
    if !check.feasible {
        return Err(EvalError::DualInfeasible);
    }
    Ok(Evaluation {
        n: inst.n(),
        m: inst.m(),
        zero_edges: inst.zero_edges().count(),
        alg_cost: sol.cost(),
        alg_edges: sol.edge_ids().collect(),
        opt,
        dual_objective: objective(&dual.dual),
        dual_clamps: dual.clamps.len(),
        trace: write_trace(inst, &report, &sol),
    })
}

/// Writes the instance, trace and both witnesses of a ratio violation into
/// `dir/<name>/`.
pub fn persist_violation(
    dir: &Path,
    name: &str,
    inst: &Instance,
    trace: &str,
    alg: (u32, &[usize]),
    opt: (u32, &[usize]),
) -> io::Result<PathBuf> {
    let path = dir.join(name);
    fs::create_dir_all(&path)?;
    fs::write(path.join("instance.txt"), write_instance(inst))?;
    fs::write(path.join("trace.txt"), trace)?;
    fs::write(path.join("alg.txt"), format!("cost {}\nedges {}\n", alg.0, join_ids(alg.1.iter().copied())))?;
    fs::write(path.join("opt.txt"), format!("cost {}\nedges {}\n", opt.0, join_ids(opt.1.iter().copied())))?;
    Ok(path)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BatchSummary {
    pub rows: usize,
    pub oracle_verified: usize,
    pub violations: usize,
    /// Worst `(alg, opt)` over oracle-verified rows, first row on ties.
    pub max_ratio: Option<(u32, u32)>,
}

impl BatchSummary {
    pub fn line(&self) -> String {
        let max = self.max_ratio.map_or("none".to_string(), |(a, o)| ratio_fields(a, o).0);
        format!(
            "rows={} oracle_verified={} violations={} max_ratio={}",
            self.rows, self.oracle_verified, self.violations, max
        )
    }
}

/// Runs every manifest row (in parallel) and returns the CSV and a summary.
/// Rows appear in manifest order whatever the scheduling.
pub fn run_batch(
    rows: &[ManifestRow],
    mode: Mode,
    check_each_step: bool,
    violations_dir: Option<&Path>,
) -> Result<(String, BatchSummary), HarnessError> {
    let evaluated: Vec<(Instance, Result<Evaluation, EvalError>)> = rows
        .par_iter()
        .map(|r| {
            let inst = gen_random(&GenParams::new(r.n, r.extra_edges, r.zero_fraction, r.seed))
                .map_err(TrialError::from)?;
            let eval = evaluate(&inst, mode, check_each_step);
            Ok((inst, eval))
        })
        .collect::<Result<_, HarnessError>>()?;

    let mut csv = String::from(BATCH_HEADER);
    csv.push('\n');
    let mut summary = BatchSummary { rows: rows.len(), ..BatchSummary::default() };
    for (i, (row, (inst, eval))) in rows.iter().zip(&evaluated).enumerate() {
        let eval = match eval {
            Ok(e) => e,
            Err(e) => {
                let _ = writeln!(csv, "{i},{},{},{},{},error,,,,,,{mode}", row.seed, inst.n(), inst.m(), inst.zero_edges().count());
                eprintln!("row {i}: {e}");
                continue;
            }
        };
        let (opt_cost, ratio, decimal) = match &eval.opt {
            Some((opt, _)) => {
                summary.oracle_verified += 1;
                let worse_than_max = summary
                    .max_ratio
                    .is_none_or(|(a, o)| u64::from(eval.alg_cost) * u64::from(o) > u64::from(a) * u64::from(*opt));
                if worse_than_max {
                    summary.max_ratio = Some((eval.alg_cost, *opt));
                }
                let (r, d) = ratio_fields(eval.alg_cost, *opt);
                (opt.to_string(), r, d)
            }
            None => (String::new(), String::new(), String::new()),
        };
        if eval.violates() {
            summary.violations += 1;
            if let (Some(dir), Some((opt, opt_edges))) = (violations_dir, &eval.opt) {
                persist_violation(
                    dir,
                    &format!("row{i}_seed{}", row.seed),
                    inst,
                    &eval.trace,
                    (eval.alg_cost, &eval.alg_edges),
                    (*opt, opt_edges),
                )?;
            }
        }
        let _ = writeln!(
            csv,
            "{i},{},{},{},{},{},{},{},{},{},{},{mode}",
            row.seed,
            eval.n,
            eval.m,
            eval.zero_edges,
            eval.alg_cost,
            opt_cost,
            ratio,
            decimal,
            format_rational(eval.dual_objective),
            eval.dual_clamps,
        );
    }
    Ok((csv, summary))
}

/// Ratio audit over a fixed instance list: solves each instance in
/// `alg_mode`, computes the exact optimum in `opt_mode`, and persists every
/// instance whose ratio exceeds 3/2 under `dir/<prefix><index>/`.
/// Violations are counted, never asserted.
pub fn audit(
    instances: &[Instance],
    alg_mode: Mode,
    opt_mode: Mode,
    prefix: &str,
    violations_dir: Option<&Path>,
) -> Result<BatchSummary, HarnessError> {
    let results: Vec<Result<Option<AuditRow>, TrialError>> =
        instances.par_iter().map(|g| audit_one(g, alg_mode, opt_mode)).collect();
    let mut summary = BatchSummary { rows: instances.len(), ..BatchSummary::default() };
    for (i, (g, r)) in instances.iter().zip(results).enumerate() {
        let Some(row) = r? else { continue };
        summary.oracle_verified += 1;
        let worse_than_max = summary
            .max_ratio
            .is_none_or(|(a, o)| u64::from(row.alg.0) * u64::from(o) > u64::from(a) * u64::from(row.opt.0));
        if worse_than_max {
            summary.max_ratio = Some((row.alg.0, row.opt.0));
        }
        if 2 * row.alg.0 > 3 * row.opt.0 {
            summary.violations += 1;
            if let Some(dir) = violations_dir {
                persist_violation(dir, &format!("{prefix}{i}"), g, &row.trace, (row.alg.0, &row.alg.1), (row.opt.0, &row.opt.1))?;
            }
        }
    }
    Ok(summary)
}

struct AuditRow {
    alg: (u32, Vec<usize>),
    opt: (u32, Vec<usize>),
    trace: String,
}

fn audit_one(g: &Instance, alg_mode: Mode, opt_mode: Mode) -> Result<Option<AuditRow>, TrialError> {
    let (sol, report) = solve(g, &SolveOptions::new(alg_mode))?;
    let opt = match opt_bnb(g, opt_mode) {
        Ok(r) => r,
        Err(OracleError::TooLarge { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    Ok(Some(AuditRow {
        alg: (sol.cost(), sol.edge_ids().collect()),
        opt: (opt.opt_cost, opt.witness.edge_ids().collect()),
        trace: write_trace(g, &report, &sol),
    }))
}

pub const SEARCH_HEADER: &str = "seed,n,m,m0,alg_cost,opt_cost,ratio,mode";

#[derive(Clone, Debug, PartialEq)]
pub struct SearchReport {
    pub csv: String,
    pub worst: Trial,
    pub worst_instance: Instance,
    pub violations: usize,
}

/// Parallel worst-ratio search over `trials` seeded trials. Trial `i` uses
/// seed `params.seed ^ i`, so the result does not depend on scheduling.
pub fn search(
    params: &GenParams,
    trials: u64,
    violations_dir: Option<&Path>,
) -> Result<SearchReport, HarnessError> {
    params.validate().map_err(TrialError::from)?;
    if trials == 0 {
        return Err(HarnessError::Manifest { line: 0, reason: "at least one trial is needed".into() });
    }
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(params, i).map(|(_, t)| t))
        .collect::<Result<_, _>>()?;

    let mode = params.mode;
    let mut csv = String::from(SEARCH_HEADER);
    csv.push('\n');
    let mut violations = 0;
    for t in &results {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{mode}",
            t.seed,
            t.n,
            t.m,
            t.zero_edges,
            t.alg_cost,
            t.opt_cost,
            ratio_fields(t.alg_cost, t.opt_cost).0
        );
        if t.exceeds_three_halves() {
            violations += 1;
            if let Some(dir) = violations_dir {
                let inst = gen_random(&params.with_seed(t.seed)).map_err(TrialError::from)?;
                let (sol, report) = solve(&inst, &SolveOptions::new(mode)).map_err(TrialError::from)?;
                persist_violation(
                    dir,
                    &format!("trial{}_seed{}", t.index, t.seed),
                    &inst,
                    &write_trace(&inst, &report, &sol),
                    (t.alg_cost, &t.alg_edges),
                    (t.opt_cost, &t.opt_edges),
                )?;
            }
        }
    }
    let worst = results.into_iter().reduce(worse).expect("trials > 0");
    let worst_instance = gen_random(&params.with_seed(worst.seed)).map_err(TrialError::from)?;
    Ok(SearchReport { csv, worst, worst_instance, violations })
}

/// Recomputes a trial's ratio from its persisted seed, independently of the
/// search that found it: regenerate, re-solve, re-run the oracle and check
/// both witnesses.
pub fn reproduce(params: &GenParams, seed: u64) -> Result<(u32, u32), HarnessError> {
    let inst = gen_random(&params.with_seed(seed)).map_err(TrialError::from)?;
    let (alg, _) = solve(&inst, &SolveOptions::new(params.mode)).map_err(TrialError::from)?;
    let opt = opt_bnb(&inst, params.mode).map_err(TrialError::from)?;
    let witness = Solution::from_edges(&inst, opt.witness.edge_ids());
    assert!(witness.is_feasible(params.mode) && alg.is_feasible(params.mode));
    Ok((alg.cost(), witness.cost()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_parsing() {
        let rows = parse_manifest("n,extra,zf,seed\n# comment\n6,2,0.5,1\n\n8, 3, 0.25, 99\n").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1], ManifestRow { n: 8, extra_edges: 3, zero_fraction: 0.25, seed: 99 });
        assert!(parse_manifest("6,2,0.5\n").is_err());
        assert!(parse_manifest("2,0,0.5,1\n").is_err());
        assert!(parse_manifest("6,x,0.5,1\n").is_err());
    }

    #[test]
    fn ratio_formatting() {
        assert_eq!(ratio_fields(6, 4), ("3/2".to_string(), "1.500000".to_string()));
        assert_eq!(ratio_fields(4, 4), ("1".to_string(), "1.000000".to_string()));
    }

    #[test]
    fn batch_rows_follow_manifest_order() {
        let rows: Vec<ManifestRow> =
            (0..12).map(|s| ManifestRow { n: 7, extra_edges: 3, zero_fraction: 0.4, seed: s }).collect();
        let (csv, summary) = run_batch(&rows, Mode::TwoVc, true, None).unwrap();
        let (again, _) = run_batch(&rows, Mode::TwoVc, false, None).unwrap();
        assert_eq!(csv, again);
        assert_eq!(csv.lines().count(), 13);
        assert!(csv.lines().skip(1).enumerate().all(|(i, l)| l.starts_with(&format!("{i},{i},"))));
        assert_eq!(summary.rows, 12);
        assert_eq!(summary.oracle_verified, 12);
        assert_eq!(summary.violations, 0);
    }

    #[test]
    fn violations_are_persisted() {
        let dir = tempfile::tempdir().unwrap();
        let g = fap_core::instances::gen_family(fap_core::instances::Family::Cycle, 4).unwrap();
        let p = persist_violation(dir.path(), "x", &g, "trace\n", (4, &[0, 1, 2, 3]), (4, &[0, 1, 2, 3])).unwrap();
        assert_eq!(fs::read_to_string(p.join("instance.txt")).unwrap(), write_instance(&g));
        assert_eq!(fs::read_to_string(p.join("opt.txt")).unwrap(), "cost 4\nedges 0,1,2,3\n");
    }
}
