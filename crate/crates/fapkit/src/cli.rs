//! The `fapkit` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 unreadable input (malformed file
//! or bad arguments), 3 infeasible input (disconnected, bridge, too small),
//! 4 instance too large for the oracle, 5 trace mismatch, 6 infeasible dual.
//! Results go to stdout as `key=value` lines or CSV; diagnostics go to stderr.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fap_core::dual::{check_feasible, objective, singleton_dual, weak_duality_check};
use fap_core::instances::{gen_family, gen_random, Family, GenParams};
use fap_core::oracle::{opt_bnb, opt_exhaustive, OracleError};
use fap_core::{solve, Instance, Mode, SolveError, SolveOptions};

use crate::format::{format_rational, join_ids, parse_dual, parse_instance, write_dual, write_instance};
use crate::harness::{parse_manifest, ratio_fields, run_batch, search};
use crate::trace::{verify, write_trace, TraceError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_TOO_LARGE: i32 = 4;
pub const EXIT_TRACE_MISMATCH: i32 = 5;
pub const EXIT_DUAL_INFEASIBLE: i32 = 6;

/// Set to `1` to re-check feasibility after every reverse-delete call.
pub const DEBUG_ENV: &str = "FAPKIT_DEBUG_ASSERT";

#[derive(Parser, Debug)]
#[command(name = "fapkit", version, about = "Forest augmentation solver, oracle and experiment harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[value(name = "2ec")]
    TwoEc,
    #[value(name = "2vc")]
    TwoVc,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::TwoEc => Mode::TwoEc,
            ModeArg::TwoVc => Mode::TwoVc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleMethod {
    Bnb,
    Exhaustive,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct ModeOpt {
    #[arg(long, value_enum, default_value = "2vc")]
    pub mode: ModeArg,
}

#[derive(Args, Debug, Clone)]
pub struct GenOpts {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub extra: usize,
    #[arg(long, default_value_t = 0.5)]
    pub zero_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the approximation algorithm on an instance file.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        mode: ModeOpt,
        /// Write the event trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the exact optimum of a small instance.
    Oracle {
        instance: PathBuf,
        #[command(flatten)]
        mode: ModeOpt,
        #[arg(long, value_enum, default_value = "bnb")]
        method: OracleMethod,
    },
    /// One CSV row comparing the algorithm with the exact optimum.
    Compare {
        instance: PathBuf,
        #[command(flatten)]
        mode: ModeOpt,
    },
    /// Generate a random instance or a member of a structured family.
    Gen {
        #[arg(long, conflicts_with = "family")]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        extra: usize,
        #[arg(long, default_value_t = 0.5)]
        zero_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// cycle, theta, wheel, tap_path or map_matching.
        #[arg(long, requires = "k")]
        family: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate every row of a manifest (`n,extra,zero_fraction,seed`).
    Batch {
        manifest: PathBuf,
        #[command(flatten)]
        mode: ModeOpt,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for instances whose ratio exceeds 3/2.
        #[arg(long)]
        violations: Option<PathBuf>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Search seeded random instances for the worst ratio.
    Search {
        #[command(flatten)]
        gen: GenOpts,
        #[command(flatten)]
        mode: ModeOpt,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        violations: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check a dual solution; without a dual file, check the singleton dual
    /// of the algorithm's solution.
    CheckDual {
        instance: PathBuf,
        dual: Option<PathBuf>,
        #[command(flatten)]
        mode: ModeOpt,
        /// Write the checked dual here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-apply a trace to an instance and compare with a fresh solve.
    Replay { instance: PathBuf, trace: PathBuf },
}

/// A failed command: exit code and message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl std::fmt::Display) -> Self {
        Failure { code, message: message.to_string() }
    }
}

type CmdResult = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn solve_failure(e: SolveError) -> Failure {
    Failure::new(EXIT_INFEASIBLE, e)
}

fn oracle_failure(e: OracleError) -> Failure {
    match e {
        OracleError::TooLarge { .. } => Failure::new(EXIT_TOO_LARGE, e),
        OracleError::Infeasible => Failure::new(EXIT_INFEASIBLE, e),
    }
}

fn options(mode: ModeOpt) -> SolveOptions {
    SolveOptions {
        mode: mode.mode.into(),
        check_each_step: std::env::var(DEBUG_ENV).is_ok_and(|v| v == "1"),
    }
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::new(EXIT_IO, e))
}

fn emit(out: Option<&Path>, text: String) -> CmdResult {
    match out {
        Some(path) => {
            write(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Runs a parsed command and returns its stdout.
pub fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Solve { instance, mode, trace, out } => {
            let inst = load_instance(&instance)?;
            let opts = options(mode);
            let (sol, report) = solve(&inst, &opts).map_err(solve_failure)?;
            if let Some(path) = trace {
                write(&path, &write_trace(&inst, &report, &sol))?;
            }
            let c = &report.census;
            let mut s = String::new();
            let _ = writeln!(s, "mode={}", report.mode);
            let _ = writeln!(s, "n={}\nm={}", inst.n(), inst.m());
            let _ = writeln!(s, "blocks={}", report.blocks.len());
            let _ = writeln!(s, "step1_cost={}", report.step1_cost());
            let _ = writeln!(s, "cost={}", sol.cost());
            let _ = writeln!(s, "edges={}", join_ids(sol.edge_ids()));
            let _ = writeln!(s, "h_size={}\npushes={}", report.h_size(), report.pushes());
            let _ = writeln!(
                s,
                "segments={}\nsegments_trivial={}\nsegments_strong={}\nsegments_weak={}\nsegments_special={}\nsegments_closed={}",
                c.total, c.trivial, c.strong, c.weak, c.special, c.closed
            );
            let divergences: usize = report.blocks.iter().map(|b| b.end_vertex_divergences).sum();
            let _ = writeln!(s, "end_vertex_divergences={divergences}");
            emit(out.as_deref(), s)
        }
        Command::Oracle { instance, mode, method } => {
            let inst = load_instance(&instance)?;
            let mode: Mode = mode.mode.into();
            let r = match method {
                OracleMethod::Bnb => opt_bnb(&inst, mode),
                OracleMethod::Exhaustive => opt_exhaustive(&inst, mode),
            }
            .map_err(oracle_failure)?;
            let method = match method {
                OracleMethod::Bnb => "bnb",
                OracleMethod::Exhaustive => "exhaustive",
            };
            Ok(format!(
                "mode={mode}\nmethod={method}\nopt_cost={}\nexplored={}\nedges={}\n",
                r.opt_cost,
                r.explored,
                join_ids(r.witness.edge_ids())
            ))
        }
        Command::Compare { instance, mode } => {
            let inst = load_instance(&instance)?;
            let opts = options(mode);
            let (sol, _) = solve(&inst, &opts).map_err(solve_failure)?;
            let opt = opt_bnb(&inst, opts.mode).map_err(oracle_failure)?;
            let (ratio, decimal) = ratio_fields(sol.cost(), opt.opt_cost);
            Ok(format!(
                "instance,n,m,m0,alg_cost,opt_cost,ratio,ratio_decimal,mode\n{},{},{},{},{},{},{ratio},{decimal},{}\n",
                instance.display(),
                inst.n(),
                inst.m(),
                inst.zero_edges().count(),
                sol.cost(),
                opt.opt_cost,
                opts.mode
            ))
        }
        Command::Gen { n, extra, zero_fraction, seed, family, k, out } => {
            let inst = match (family, n) {
                (Some(name), _) => {
                    let f = Family::parse(&name).ok_or_else(|| Failure::new(EXIT_PARSE, format!("unknown family {name:?}")))?;
                    gen_family(f, k.expect("clap enforces --k")).map_err(|e| Failure::new(EXIT_PARSE, e))?
                }
                (None, Some(n)) => gen_random(&GenParams::new(n, extra, zero_fraction, seed))
                    .map_err(|e| Failure::new(EXIT_PARSE, e))?,
                (None, None) => return Err(Failure::new(EXIT_PARSE, "either --n or --family is required")),
            };
            emit(out.as_deref(), write_instance(&inst))
        }
        Command::Batch { manifest, mode, out, violations, jobs } => {
            let rows = parse_manifest(&read(&manifest)?).map_err(|e| Failure::new(EXIT_PARSE, e))?;
            let opts = options(mode);
            let (csv, summary) = pool(jobs)?
                .install(|| run_batch(&rows, opts.mode, opts.check_each_step, violations.as_deref()))
                .map_err(|e| Failure::new(EXIT_IO, e))?;
            eprintln!("{}", summary.line());
            emit(out.as_deref(), csv)
        }
        Command::Search { gen, mode, trials, out, violations, jobs } => {
            let params = GenParams { mode: mode.mode.into(), ..GenParams::new(gen.n, gen.extra, gen.zero_fraction, gen.seed) };
            let report = pool(jobs)?
                .install(|| search(&params, trials, violations.as_deref()))
                .map_err(|e| match e {
                    crate::harness::HarnessError::Io(e) => Failure::new(EXIT_IO, e),
                    other => Failure::new(EXIT_PARSE, other),
                })?;
            let w = &report.worst;
            eprintln!(
                "trials={trials} violations={} max_ratio={} worst_trial={} worst_seed={}",
                report.violations,
                ratio_fields(w.alg_cost, w.opt_cost).0,
                w.index,
                w.seed
            );
            emit(out.as_deref(), report.csv)
        }
        Command::CheckDual { instance, dual, mode, out } => {
            let inst = load_instance(&instance)?;
            let opts = options(mode);
            let solved = solve(&inst, &opts);
            let mut s = String::new();
            let d = match dual {
                Some(path) => parse_dual(&inst, &read(&path)?).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?,
                None => {
                    let (sol, _) = solved.as_ref().map_err(|e| solve_failure(e.clone()))?;
                    let built = singleton_dual(sol, opts.mode);
                    for c in &built.clamps {
                        let _ = writeln!(
                            s,
                            "clamp vertex={} edge={} from={} to={}",
                            c.vertex,
                            c.edge,
                            format_rational(c.from),
                            format_rational(c.to)
                        );
                    }
                    built.dual
                }
            };
            let check = check_feasible(&inst, &d).map_err(|e| Failure::new(EXIT_PARSE, e))?;
            let _ = writeln!(s, "feasible={}", check.feasible);
            let _ = writeln!(s, "objective={}", format_rational(objective(&d)));
            for v in &check.violations {
                let _ = writeln!(
                    s,
                    "violation edge={} load={} capacity={} slack={}",
                    v.edge,
                    format_rational(v.load),
                    format_rational(v.capacity),
                    format_rational(v.slack())
                );
            }
            if let (true, Ok((sol, _))) = (check.feasible, &solved) {
                if let Ok(w) = weak_duality_check(&inst, &d, sol) {
                    let _ = writeln!(s, "alg_cost={}\nweak_duality={}", w.cost, if w.holds { "holds" } else { "fails" });
                }
            }
            if let Some(path) = out {
                write(&path, &write_dual(&inst, &d))?;
            }
            if check.feasible {
                Ok(s)
            } else {
                print!("{s}");
                Err(Failure::new(EXIT_DUAL_INFEASIBLE, "dual solution is infeasible"))
            }
        }
        Command::Replay { instance, trace } => {
            let inst = load_instance(&instance)?;
            let text = read(&trace)?;
            match verify(&inst, &text) {
                Ok(sol) => Ok(format!("replay=ok\ncost={}\nedges={}\n", sol.cost(), join_ids(sol.edge_ids()))),
                Err(e @ TraceError::Malformed { .. }) => Err(Failure::new(EXIT_TRACE_MISMATCH, e)),
                Err(e) => Err(Failure::new(EXIT_TRACE_MISMATCH, e)),
            }
        }
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            EXIT_OK
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
