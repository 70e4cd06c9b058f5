//! `homspace` command-line tool.

mod commands;
mod reproduce;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use homspace::Error;

#[derive(Debug, Parser)]
#[command(name = "homspace", version, about = "Homogeneous spaces as Lie brackets: curvature, jets, flows, classification")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Membership report for (h1)-(h4); exits 1 if the bracket fails.
    Check {
        bracket: PathBuf,
        /// Residual tolerance (default scales with the bracket norm).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Riemann tensor, Ricci operator, eigenvalues and `tr Ric^k` at the origin.
    Curvature { bracket: PathBuf },
    /// Curvature fingerprint up to `nabla^K Riem` and its O(n)-invariant scalars.
    Invariants {
        bracket: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Distance between the O(n)-orbits of two fingerprints.
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative tolerance of the invariant comparison.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Taylor coefficients of the metric in canonical coordinates.
    Jet {
        bracket: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Rational coefficients, rebuilt from the family tag.
        #[arg(long)]
        exact: bool,
        /// Use the chart `exp(u) exp(v)` with `u` the first SPLIT coordinates.
        #[arg(long)]
        split: Option<usize>,
        /// Evaluate the truncated metric at this many random points instead (CSV).
        #[arg(long)]
        grid: Option<usize>,
        /// Radius of the cube the grid points are drawn from.
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bracket flow, written as a trajectory CSV.
    Flow {
        bracket: Option<PathBuf>,
        #[arg(long)]
        t_end: f64,
        /// Keep `|mu| = 1`.
        #[arg(long)]
        normalized: bool,
        /// Include the structure constants (needed for `--resume`).
        #[arg(long)]
        constants: bool,
        /// Continue from the last row of a trajectory CSV written with `--constants`.
        #[arg(long, conflicts_with = "bracket")]
        resume: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        sample_dt: f64,
        #[arg(long, default_value_t = 1e-9)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-12)]
        atol: f64,
    },
    /// Emit a bracket file for a family member.
    Family {
        /// One of ex0-3, ex1-3, ex1-5, aw, h3.
        name: String,
        /// Comma-separated parameters in constructor order.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        params: String,
    },
    /// Homotopy, homeomorphism and diffeomorphism type of two Aloff-Wallach spaces.
    #[command(allow_negative_numbers = true)]
    Aw {
        p: String,
        q: String,
        pt: String,
        qt: String,
        #[arg(long)]
        json: bool,
    },
    /// Pairs of Aloff-Wallach spaces with `r <= R_MAX` that are homotopy
    /// equivalent but not homeomorphic, or homeomorphic but not diffeomorphic.
    AwSearch {
        #[arg(long)]
        r_max: u64,
    },
    /// Compare a sequence of family members with a limit bracket (CSV).
    Sequence {
        family: String,
        /// Parameter template with `{k}`, `{k+c}`, `{k-c}`, `{c*k}` placeholders.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "member")]
        sweep: Option<String>,
        #[arg(long, default_value_t = 1)]
        k_from: i64,
        #[arg(long, default_value_t = 20)]
        k_to: i64,
        /// An explicit member; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        member: Vec<String>,
        /// Bracket file of the limit.
        #[arg(long)]
        limit: PathBuf,
        /// Reinterpret the limit with this many isotropy directions.
        #[arg(long)]
        limit_q: Option<usize>,
    },
    /// Scripted experiments; CSVs go to `--out-dir`.
    Reproduce {
        /// ex0-3, berger, hyp, aw3 or coll.
        example: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// 1 for bad input, 2 for numerical failure.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::IllConditioned(_) | Error::StepUnderflow { .. } => 2,
        _ => 1,
    }
}

fn init_threads() -> homspace::Result<()> {
    let Ok(v) = std::env::var("HOMSPACE_THREADS") else {
        return Ok(());
    };
    let n: usize =
        v.trim().parse().map_err(|_| Error::InvalidParameter(format!("HOMSPACE_THREADS must be an integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> homspace::Result<u8> {
    init_threads()?;
    let out = cli.output.as_deref();
    match cli.command {
        Command::Check { bracket, tol } => commands::check(&bracket, tol, out),
        Command::Curvature { bracket } => commands::curvature(&bracket, out).map(|_| 0),
        Command::Invariants { bracket, order } => commands::invariants(&bracket, order, out).map(|_| 0),
        Command::Distance { a, b, order, restarts, seed, tol } => {
            commands::distance(&a, &b, order, restarts, seed, tol, out).map(|_| 0)
        }
        Command::Jet { bracket, degree, exact, split, grid, radius, seed } => {
            let opts = commands::JetOptions { degree, exact, split, grid, radius, seed };
            commands::jet(&bracket, &opts, out).map(|_| 0)
        }
        Command::Flow { bracket, t_end, normalized, constants, resume, sample_dt, rtol, atol } => {
            let opts = commands::FlowOptions { t_end, normalized, constants, sample_dt, rtol, atol };
            commands::flow(bracket.as_deref(), resume.as_deref(), &opts, out)
        }
        Command::Family { name, params } => commands::family(&name, &params, out).map(|_| 0),
        Command::Aw { p, q, pt, qt, json } => commands::aw(&[p, q, pt, qt], json, out).map(|_| 0),
        Command::AwSearch { r_max } => commands::aw_search(r_max, out).map(|_| 0),
        Command::Sequence { family, sweep, k_from, k_to, member, limit, limit_q } => {
            let members = match sweep {
                Some(t) => sweep::expand(&t, k_from, k_to)?,
                None => member,
            };
            commands::sequence(&family, &members, &limit, limit_q, out).map(|_| 0)
        }
        Command::Reproduce { example, out_dir, seed } => reproduce::run(&example, &out_dir, seed).map(|_| 0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
