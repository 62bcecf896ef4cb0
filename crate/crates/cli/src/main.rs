//! `logsparse` command-line front end.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "logsparse",
    version,
    about = "Log-sparse set families, sumsets and progressions"
)]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a set family.
    #[command(subcommand)]
    Construct(Construct),
    /// Check sparsity, sumset coverage or condenser expansion.
    #[command(subcommand)]
    Verify(Verify),
    /// Emit a matching certificate for one target.
    Decompose(DecomposeArgs),
    /// List sumset members up to a bound.
    Sumset(SumsetArgs),
    /// Longest arithmetic progression in a set.
    LongestAp(LongestApArgs),
    /// Largest progression length allowed by the counting bound.
    Bound(BoundArgs),
    /// Failure-probability series for the random construction.
    UnionBound(UnionBoundArgs),
}

#[derive(Debug, Subcommand)]
enum Construct {
    /// Quadratic-polynomial construction over GF(q).
    Explicit(ExplicitArgs),
    /// Random digit construction.
    Random(RandomArgs),
}

#[derive(Debug, Args)]
struct ExplicitArgs {
    /// Field order: a prime or a power of two.
    #[arg(long)]
    q: u32,
    /// binary (q = 2^k) or base_q.
    #[arg(long, default_value = "binary")]
    mode: String,
    /// Irreducible modulus for GF(2^k), as a bitmask (e.g. 0xB).
    #[arg(long)]
    modulus: Option<String>,
    /// Amount every set is translated by; must be at least 1.
    #[arg(long, default_value_t = 1)]
    shift: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RandomArgs {
    #[arg(long)]
    n: usize,
    /// ε in (0, 1), as a decimal or a fraction a/b.
    #[arg(long)]
    eps: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    shift: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// Check every set of a family (or a plain list) for log-sparseness.
    Sparse(SparseArgs),
    /// Certify that sumset targets are hit, via matchings.
    Coverage(CoverageArgs),
    /// Check that small polynomial subsets of the condenser expand.
    Expansion(ExpansionArgs),
}

#[derive(Debug, Args)]
struct SparseArgs {
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    family: Option<PathBuf>,
    /// Plain text, one decimal per line.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Sparsity constant; defaults to the family's declared one.
    #[arg(long = "C")]
    c: Option<usize>,
}

#[derive(Debug, Args)]
struct CoverageArgs {
    #[arg(long)]
    family: PathBuf,
    /// Every target of the covered interval.
    #[arg(long, conflicts_with_all = ["samples", "start"])]
    exhaustive: bool,
    /// Number of uniformly sampled targets.
    #[arg(long, requires = "seed")]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// First target of an explicit range (absolute).
    #[arg(long, requires = "end", conflicts_with = "samples")]
    start: Option<String>,
    /// End of the range, exclusive.
    #[arg(long)]
    end: Option<String>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExpansionArgs {
    #[arg(long)]
    q: u32,
    /// Largest subset size; defaults to ⌊q²/4⌋.
    #[arg(long)]
    x: Option<usize>,
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    /// Cap on the number of subsets in exhaustive mode.
    #[arg(long, default_value_t = logsparse::matching::DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
    #[arg(long, requires = "seed")]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    target: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SumsetArgs {
    #[arg(long)]
    family: PathBuf,
    /// Inclusive upper bound.
    #[arg(long)]
    below: String,
    #[arg(long, default_value_t = logsparse::sumset::DEFAULT_FRONTIER_BUDGET)]
    budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LongestApArgs {
    /// Plain text, one decimal per line.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    file: Option<PathBuf>,
    /// Generator of the form "u^a+v^b".
    #[arg(long, requires = "below")]
    gen: Option<String>,
    /// Exclusive bound for --gen.
    #[arg(long)]
    below: Option<String>,
    /// dp or bruteforce.
    #[arg(long, default_value = "dp")]
    method: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long, conflicts_with_all = ["n_min", "n_max"], required_unless_present_all = ["n_min", "n_max"])]
    n: Option<usize>,
    /// First n of a sweep.
    #[arg(long, requires = "n_max")]
    n_min: Option<usize>,
    /// Last n of a sweep, inclusive.
    #[arg(long, requires = "n_min")]
    n_max: Option<usize>,
    #[arg(long = "C")]
    c: usize,
    /// Sweep output file (CSV); stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct UnionBoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    eps: String,
    /// Include every per-k log term.
    #[arg(long)]
    terms: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::usage(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Construct(Construct::Explicit(a)) => commands::construct_explicit(
            a.q,
            &a.mode,
            a.modulus.as_deref(),
            a.shift,
            a.out.as_deref(),
        ),
        Command::Construct(Construct::Random(a)) => {
            commands::construct_random(a.n, &a.eps, a.seed, a.shift, a.out.as_deref())
        }
        Command::Verify(Verify::Sparse(a)) => {
            commands::verify_sparse(a.family.as_deref(), a.file.as_deref(), a.c)
        }
        Command::Verify(Verify::Coverage(a)) => {
            let targets = commands::coverage_targets(
                a.exhaustive,
                a.samples,
                a.seed,
                a.start.as_deref(),
                a.end.as_deref(),
            )?;
            commands::verify_coverage(&a.family, targets, a.report.as_deref())
        }
        Command::Verify(Verify::Expansion(a)) => {
            let mode = match (a.exhaustive, a.samples, a.seed) {
                (true, _, _) => logsparse::explicit::ExpansionMode::Exhaustive { budget: a.budget },
                (false, Some(count), Some(seed)) => {
                    logsparse::explicit::ExpansionMode::Sampled { count, seed }
                }
                _ => {
                    return Err(CliError::usage(
                        "choose --exhaustive or --samples N --seed S",
                    ))
                }
            };
            commands::verify_expansion(a.q, a.x, mode, a.out.as_deref())
        }
        Command::Decompose(a) => commands::decompose(&a.family, &a.target, a.out.as_deref()),
        Command::Sumset(a) => commands::sumset(&a.family, &a.below, a.budget, a.out.as_deref()),
        Command::LongestAp(a) => commands::longest_ap(
            a.file.as_deref(),
            a.gen.as_deref(),
            a.below.as_deref(),
            &a.method,
            a.out.as_deref(),
        ),
        Command::Bound(a) => match (a.n, a.n_min, a.n_max) {
            (Some(n), _, _) => commands::bound_single(n, a.c, a.out.as_deref()),
            (None, Some(lo), Some(hi)) => commands::bound_sweep(lo, hi, a.c, a.out.as_deref()),
            _ => Err(CliError::usage("give --n or both --n-min and --n-max")),
        },
        Command::UnionBound(a) => commands::union_bound(a.n, &a.eps, a.terms, a.out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let rendered = e.render().to_string();
            return CliError::usage(rendered.trim_end()).report();
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
