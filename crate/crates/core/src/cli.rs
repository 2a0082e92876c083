//! The `edgesched` command line.
//!
//! Exit codes: 0 success, 1 infeasible instance, 2 I/O, schema or usage
//! error, 3 property-suite failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::amdp::DEFAULT_DELTA;
use crate::gen::{generate, GenParams, Profile};
use crate::io::{append_records, read_instance, write_instance, write_records, IoError, RunRecord};
use crate::model::Algorithm;
use crate::solve::{solve, SolveError};
use crate::verify::run_verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

/// Overrides the AMDP grid resolution when `--delta` is absent.
pub const DELTA_ENV: &str = "EDGESCHED_DELTA";

#[derive(Debug, Parser)]
#[command(name = "edgesched", version, about = "Deadline-constrained inference offloading schedulers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded instance file.
    Gen {
        #[arg(long, value_parser = parse_profile)]
        profile: Profile,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long = "T")]
        deadline: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Image size probabilities for table2, e.g. `0.2,0.3,0.5`.
        #[arg(long, value_delimiter = ',')]
        mix: Option<Vec<f64>>,
        /// Time grid for identical_random.
        #[arg(long)]
        grid: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance file and append one CSV row (stdout without --out).
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_parser = parse_algorithm)]
        algo: Algorithm,
        #[arg(long)]
        delta: Option<f64>,
        /// Seed recorded in the row.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve generated instances over a parameter range.
    Sweep {
        /// GenParams JSON used as the base of every instance.
        #[arg(long)]
        instance_template: PathBuf,
        /// Number of seeds per point, counted up from the template seed.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, value_enum)]
        vary: Vary,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, value_delimiter = ',', value_parser = parse_algorithm, required = true)]
        algos: Vec<Algorithm>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded property suites.
    Verify {
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// Per-case CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Vary {
    #[value(name = "T")]
    Deadline,
    #[value(name = "n")]
    Jobs,
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse()
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn io(message: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_IO, message: message.to_string() }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::io(e)
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::Infeasible(_) => EXIT_INFEASIBLE,
            SolveError::Precondition(_) | SolveError::Internal(_) => EXIT_IO,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_IO } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("edgesched: {}", f.message);
            f.code
        }
    }
}

fn resolve_delta(flag: Option<f64>) -> Result<f64, Failure> {
    if let Some(d) = flag {
        return Ok(d);
    }
    match std::env::var(DELTA_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| Failure::io(format!("{DELTA_ENV}={text:?} is not a number"))),
        Err(_) => Ok(DEFAULT_DELTA),
    }
}

fn emit(out: Option<&Path>, records: &[RunRecord]) -> Result<(), Failure> {
    match out {
        Some(path) => append_records(path, records)?,
        None => write_records(std::io::stdout().lock(), records, true)?,
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Gen { profile, n, m, deadline, seed, mix, grid, out } => {
            let mut params = GenParams::new(profile, n, m, deadline, seed);
            params.size_mix = match mix.as_deref() {
                None => None,
                Some(&[a, b, c]) => Some([a, b, c]),
                Some(_) => return Err(Failure::io("--mix takes three comma-separated proportions")),
            };
            params.grid = grid;
            let inst = generate(&params).map_err(Failure::io)?;
            write_instance(&out, &inst)?;
            Ok(EXIT_OK)
        }
        Command::Solve { instance, algo, delta, seed, out } => {
            let delta = resolve_delta(delta)?;
            let inst = read_instance(&instance)?;
            let report = solve(&inst, algo, delta)?;
            emit(out.as_deref(), &[RunRecord::new(&inst, &report, seed)])?;
            Ok(EXIT_OK)
        }
        Command::Sweep { instance_template, seeds, vary, from, to, steps, algos, delta, out } => {
            let delta = resolve_delta(delta)?;
            let text = std::fs::read_to_string(&instance_template)
                .map_err(|e| Failure::io(format!("{}: {e}", instance_template.display())))?;
            let template: GenParams = serde_json::from_str(&text).map_err(Failure::io)?;
            let records = sweep(&template, seeds, vary, from, to, steps, &algos, delta)?;
            emit(out.as_deref(), &records)?;
            Ok(EXIT_OK)
        }
        Command::Verify { seeds, out } => {
            let outcome = run_verify(seeds);
            for suite in &outcome.suites {
                println!("{suite}");
            }
            if let Some(path) = out {
                std::fs::File::create(&path)
                    .and_then(|mut f| f.write_all(&outcome.to_csv()))
                    .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            }
            Ok(if outcome.all_passed() { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}

/// Evenly spaced points from `from` to `to`; `n` values are rounded.
fn sweep_points(vary: Vary, from: f64, to: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(Failure::io("sweep needs finite bounds and at least one step"));
    }
    let points = (0..steps).map(|k| {
        let x = if steps == 1 { from } else { from + (to - from) * k as f64 / (steps - 1) as f64 };
        match vary {
            Vary::Deadline => x,
            Vary::Jobs => x.round(),
        }
    });
    Ok(points.collect())
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    template: &GenParams,
    seeds: u64,
    vary: Vary,
    from: f64,
    to: f64,
    steps: usize,
    algos: &[Algorithm],
    delta: f64,
) -> Result<Vec<RunRecord>, Failure> {
    let mut jobs = Vec::new();
    for x in sweep_points(vary, from, to, steps)? {
        for r in 0..seeds {
            let mut params = template.clone();
            params.seed = template.seed.wrapping_add(r);
            match vary {
                Vary::Deadline => params.deadline = x,
                Vary::Jobs => params.n = x as usize,
            }
            for &algo in algos {
                jobs.push((params.clone(), algo));
            }
        }
    }
    let results: Vec<Result<Option<RunRecord>, Failure>> = jobs
        .par_iter()
        .map(|(params, algo)| {
            let inst = generate(params).map_err(Failure::io)?;
            match solve(&inst, *algo, delta) {
                Ok(report) => Ok(Some(RunRecord::new(&inst, &report, Some(params.seed)))),
                Err(SolveError::Infeasible(msg)) => {
                    eprintln!("edgesched: {algo} seed {} T {}: infeasible: {msg}", params.seed, params.deadline);
                    Ok(None)
                }
                Err(e) => Err(Failure::from(e)),
            }
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        records.extend(r?);
    }
    Ok(records)
}
