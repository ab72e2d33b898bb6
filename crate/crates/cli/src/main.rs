//! `lpconst`: best constants in `inf |f^(n)| <= C ||f||_p` from the command
//! line.
//!
//! Exit codes: 0 ok, 1 bad usage, 2 the solver did not converge, 3 a
//! verification check failed.

mod cache;
mod format;
mod record;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{ArgAction, Parser, Subcommand};
use serde_json::Map;

use extremal_core::constants::report_from_solution;
use extremal_core::explorer::{limit_ratio_table, log_grid, normalize_grid, root_trajectory_sweep};
use extremal_core::extremal::NelderMeadOptions;
use extremal_core::quadrature::{DEFAULT_REL_TOL, MAX_REL_TOL, MIN_REL_TOL};
use extremal_core::verify::{self, Suite, VerifyOptions};
use extremal_core::{constant, solve_extremal, Error, Interval, PNorm, SolveOptions};

use cache::{Cache, CacheRows};
use format::{write_records, Format};
use record::{constant_record, extremal_record, row_record, suite_record, sweep_summary, Inputs, ResultRecord};

#[derive(Parser)]
#[command(name = "lpconst", version, about = "Best constants for inf|f^(n)| <= C ||f||_p")]
struct Cli {
    /// Relative tolerance of the quadrature.
    #[arg(long, global = true, default_value_t = DEFAULT_REL_TOL)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print nothing on standard output.
    #[arg(long, global = true)]
    quiet: bool,
    /// JSON-lines cache; every record is appended to it.
    #[arg(long, global = true, env = "LPCONST_CACHE")]
    cache: Option<PathBuf>,
    /// Objective evaluations allowed per Nelder-Mead start.
    #[arg(long, global = true, default_value_t = NelderMeadOptions::default().max_evals)]
    max_evals: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// C*(n, p, I) and C(n, p) with closed forms and bound checks.
    Constant {
        #[arg(long)]
        n: usize,
        /// A positive number or `inf`.
        #[arg(long, allow_hyphen_values = true)]
        p: PNorm,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true, default_values_t = [0.0, 1.0])]
        interval: Vec<f64>,
        #[arg(long)]
        force_numeric: bool,
    },
    /// The monic polynomial of least L^p norm.
    Extremal {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        p: PNorm,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true, default_values_t = [0.0, 1.0])]
        interval: Vec<f64>,
        /// Jittered starts on top of the three classical seeds.
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        /// Skip the closed forms at p = 1, 2, inf.
        #[arg(long)]
        force_numeric: bool,
    },
    /// Root trajectories x_{n,i}(p) over a log-spaced grid of p.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.25)]
        p_min: f64,
        #[arg(long, default_value_t = 16.0)]
        p_max: f64,
        #[arg(long, default_value_t = 33)]
        points: usize,
        /// Start each solve from the previous roots (default on).
        #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true", action = ArgAction::Set)]
        warm_start: bool,
        /// Leave p = 1, 2, inf out of the grid.
        #[arg(long)]
        no_classical: bool,
        #[arg(long)]
        force_numeric: bool,
        /// Reuse rows already present in the cache.
        #[arg(long)]
        resume: bool,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true, default_values_t = [-1.0, 1.0])]
        interval: Vec<f64>,
    },
    /// Named check suites; exits 3 if any check fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// R(n, p) = 2^(-2n) C(n, p)/n! for n = 1..nmax with differences.
    LimitTable {
        #[arg(long, allow_hyphen_values = true)]
        p: PNorm,
        #[arg(long, default_value_t = 14)]
        nmax: usize,
        #[arg(long)]
        force_numeric: bool,
        #[arg(long)]
        resume: bool,
    },
}

enum Failure {
    Usage(String),
    NotConverged(Vec<ResultRecord>, String),
    Verification(Vec<ResultRecord>, String),
    Io(io::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 1,
            Failure::NotConverged(..) => 2,
            Failure::Verification(..) => 3,
        }
    }

    /// Records worth printing despite the failure, and the message.
    fn into_parts(self) -> (Vec<ResultRecord>, String) {
        match self {
            Failure::Usage(m) => (Vec::new(), m),
            Failure::Io(e) => (Vec::new(), e.to_string()),
            Failure::NotConverged(r, m) | Failure::Verification(r, m) => (r, m),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn usage_or_solver(e: Error) -> Failure {
    match e {
        Error::InvalidInterval { .. }
        | Error::InvalidP(_)
        | Error::InvalidTolerance(_)
        | Error::DegreeOutOfRange { .. }
        | Error::InvalidRoots(_)
        | Error::ExponentMismatch(_) => Failure::Usage(e.to_string()),
        other => Failure::NotConverged(Vec::new(), other.to_string()),
    }
}

fn interval(v: &[f64]) -> Result<Interval, Failure> {
    Interval::new(v[0], v[1]).map_err(|e| Failure::Usage(e.to_string()))
}

struct Ctx {
    tol: f64,
    nelder_mead: NelderMeadOptions,
    cache: Option<Cache>,
}

impl Ctx {
    fn solve_opts(&self, force_numeric: bool) -> SolveOptions {
        SolveOptions {
            rel_tol: self.tol,
            force_numeric,
            nelder_mead: self.nelder_mead,
            ..SolveOptions::default()
        }
    }

    fn remember(&self, records: &[ResultRecord]) {
        if let Some(c) = &self.cache {
            for r in records {
                if let Err(e) = c.append(r) {
                    eprintln!("warning: cannot write cache {}: {e}", c.path().display());
                }
            }
        }
    }
}

fn run(cli: &Cli, ctx: &Ctx) -> Result<Vec<ResultRecord>, Failure> {
    match &cli.command {
        Command::Constant {
            n,
            p,
            interval: iv,
            force_numeric,
        } => {
            let i = interval(iv)?;
            match constant(*n, *p, &i, &ctx.solve_opts(*force_numeric)) {
                Ok(r) => {
                    let recs = vec![constant_record(&r, ctx.tol)];
                    ctx.remember(&recs);
                    Ok(recs)
                }
                Err(Error::NotConverged { best }) => {
                    let rec = constant_record(&report_from_solution(*best), ctx.tol);
                    Err(Failure::NotConverged(vec![rec], "solver did not converge".into()))
                }
                Err(e) => Err(usage_or_solver(e)),
            }
        }
        Command::Extremal {
            n,
            p,
            interval: iv,
            restarts,
            force_numeric,
        } => {
            let i = interval(iv)?;
            let opts = SolveOptions {
                jittered_starts: *restarts,
                ..ctx.solve_opts(*force_numeric)
            };
            let inputs = Inputs::new(Some(*n), Some(*p), Some(&i), ctx.tol)
                .with("restarts", *restarts)
                .with("forceNumeric", *force_numeric);
            match solve_extremal(*n, *p, &i, &opts) {
                Ok(sol) => {
                    let recs = vec![extremal_record(&sol, inputs)];
                    ctx.remember(&recs);
                    Ok(recs)
                }
                Err(Error::NotConverged { best }) => Err(Failure::NotConverged(
                    vec![extremal_record(&best, inputs)],
                    "solver did not converge".into(),
                )),
                Err(e) => Err(usage_or_solver(e)),
            }
        }
        Command::Sweep {
            n,
            p_min,
            p_max,
            points,
            warm_start,
            no_classical,
            force_numeric,
            resume,
            interval: iv,
        } => {
            let i = interval(iv)?;
            let mut grid: Vec<PNorm> = log_grid(*p_min, *p_max, *points)
                .map_err(|e| Failure::Usage(e.to_string()))?
                .into_iter()
                .map(PNorm::Finite)
                .collect();
            if !no_classical {
                grid.extend([PNorm::Finite(1.0), PNorm::Finite(2.0), PNorm::Infinity]);
            }
            let grid = normalize_grid(grid);
            let mut extra = Map::new();
            extra.insert("warmStart".into(), (*warm_start).into());
            extra.insert("forceNumeric".into(), (*force_numeric).into());
            let store = CacheRows {
                cache: ctx.cache.as_ref(),
                resume: *resume,
                command: "sweep",
                interval: i,
                tol: ctx.tol,
                extra: extra.clone(),
                fresh: Mutex::new(Vec::new()),
            };
            let table = root_trajectory_sweep(*n, &grid, &i, &ctx.solve_opts(*force_numeric), *warm_start, &store)
                .map_err(usage_or_solver)?;
            let mut recs: Vec<ResultRecord> = table
                .rows
                .iter()
                .map(|r| row_record("sweep", r, &i, ctx.tol, &extra))
                .collect();
            let inputs = Inputs::new(Some(*n), None, Some(&i), ctx.tol)
                .with("pMin", *p_min)
                .with("pMax", *p_max)
                .with("points", *points)
                .with("warmStart", *warm_start)
                .with("classical", !no_classical)
                .with("forceNumeric", *force_numeric);
            recs.push(sweep_summary("sweep", &table, inputs));
            if table.any_suspect() {
                return Err(Failure::NotConverged(recs, "some sweep rows did not converge".into()));
            }
            Ok(recs)
        }
        Command::Verify { suite, nmax } => {
            let opts = VerifyOptions {
                n_max: *nmax,
                rel_tol: ctx.tol,
                nelder_mead: ctx.nelder_mead,
                ..VerifyOptions::default()
            };
            let reports = verify::run(*suite, &opts);
            let recs: Vec<ResultRecord> = reports
                .iter()
                .map(|r| {
                    let inputs = Inputs::new(None, None, None, ctx.tol)
                        .with("suite", r.suite.to_string())
                        .with("nmax", *nmax);
                    suite_record(r, inputs)
                })
                .collect();
            ctx.remember(&recs);
            let failed: Vec<String> = reports
                .iter()
                .flat_map(|r| r.failures().map(|c| format!("{}: {}: {}", r.suite, c.name, c.detail)))
                .collect();
            if failed.is_empty() {
                Ok(recs)
            } else {
                Err(Failure::Verification(recs, failed.join("\n")))
            }
        }
        Command::LimitTable {
            p,
            nmax,
            force_numeric,
            resume,
        } => {
            let i = Interval::unit();
            let mut extra = Map::new();
            extra.insert("forceNumeric".into(), (*force_numeric).into());
            let store = CacheRows {
                cache: ctx.cache.as_ref(),
                resume: *resume,
                command: "limit-table",
                interval: i,
                tol: ctx.tol,
                extra: extra.clone(),
                fresh: Mutex::new(Vec::new()),
            };
            let table =
                limit_ratio_table(*nmax, *p, &i, &ctx.solve_opts(*force_numeric), &store).map_err(usage_or_solver)?;
            let mut recs: Vec<ResultRecord> = table
                .rows
                .iter()
                .map(|r| row_record("limit-table", r, &i, ctx.tol, &extra))
                .collect();
            let inputs = Inputs::new(None, Some(*p), Some(&i), ctx.tol)
                .with("nmax", *nmax)
                .with("forceNumeric", *force_numeric);
            recs.push(sweep_summary("limit-table", &table, inputs));
            if table.any_suspect() {
                return Err(Failure::NotConverged(recs, "some rows did not converge".into()));
            }
            Ok(recs)
        }
    }
}

fn emit(cli: &Cli, records: &mut [ResultRecord], started: Instant) -> io::Result<()> {
    let wall = started.elapsed().as_millis() as u64;
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    for r in records.iter_mut() {
        r.metadata.wall_time_ms = wall;
        r.metadata.timestamp = now;
    }
    if let Some(path) = &cli.out {
        let mut w = BufWriter::new(File::create(path)?);
        write_records(&mut w, records, cli.format)?;
        w.flush()?;
    } else if !cli.quiet {
        let stdout = io::stdout();
        let mut w = stdout.lock();
        write_records(&mut w, records, cli.format)?;
        w.flush()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if !(MIN_REL_TOL..=MAX_REL_TOL).contains(&cli.tol) {
        eprintln!("error: --tol must lie in [{MIN_REL_TOL:e}, {MAX_REL_TOL:e}]");
        return ExitCode::from(1);
    }
    let cache = match &cli.cache {
        Some(path) => match Cache::open(path) {
            Ok(c) => Some(c),
            Err(e) => {
                eprintln!("error: cannot open cache {}: {e}", path.display());
                return ExitCode::from(1);
            }
        },
        None => None,
    };
    if cli.max_evals == 0 {
        eprintln!("error: --max-evals must be positive");
        return ExitCode::from(1);
    }
    let ctx = Ctx {
        tol: cli.tol,
        nelder_mead: NelderMeadOptions {
            max_evals: cli.max_evals,
            ..NelderMeadOptions::default()
        },
        cache,
    };
    let started = Instant::now();
    let (mut records, code, message) = match run(&cli, &ctx) {
        Ok(r) => (r, 0, None),
        Err(f) => {
            let code = f.exit_code();
            let (r, m) = f.into_parts();
            (r, code, Some(m))
        }
    };
    if let Err(e) = emit(&cli, &mut records, started) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    if let Some(m) = message {
        eprintln!("error: {m}");
    }
    ExitCode::from(code)
}
