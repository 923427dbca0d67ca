mod commands;
mod error;
mod output;
mod resolve;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;
use output::{render, Format};
use resolve::Resolver;

/// Environment variable holding the default worker-thread count.
pub const THREADS_ENV: &str = "ROTRAP_THREADS";

#[derive(Parser, Debug)]
#[command(name = "rotrap", version, about = "Mean first passage times for a rotating trap in a disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; defaults to CSV for curves and fields, JSON for scalars.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads (0 = one per core). Default taken from ROTRAP_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Config file of `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write output here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// More log output on standard error (repeatable).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Do not echo resolved parameters on standard error.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lattice random-walk estimates of the MFPT.
    #[command(subcommand)]
    Simulate(Simulate),
    /// Asymptotic MFPT field on a polar grid.
    Field(FieldArgs),
    /// Mass (domain-integrated MFPT) against the ring radius.
    MassCurve(MassCurveArgs),
    /// Optimal ring radius at fixed angular velocity.
    Optimum(OptimumArgs),
    /// Critical angular velocity where the centre stops being optimal.
    Bifurcation(BifurcationArgs),
    /// Inner-problem constant u0(s0) and its derivative.
    U0Table(U0Args),
    /// Optimal ring radius against the linear speed of the trap.
    SpeedCurve(SpeedArgs),
}

#[derive(Args, Debug)]
struct WalkArgs {
    /// Number of walkers per start point.
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Steps after which a walker is censored.
    #[arg(long)]
    max_steps: Option<u64>,
    /// Diffusivity; the time step follows from it and the lattice spacing.
    #[arg(long)]
    d: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Simulate {
    /// Reflecting interval [0, 1] with a fixed trap.
    Interval(IntervalArgs),
    /// Circle with a trap rotating at angular velocity -omega.
    Circle(CircleArgs),
    /// Unit disk with a trap on the ring r = r0.
    Disk(DiskArgs),
}

#[derive(Args, Debug)]
struct IntervalArgs {
    #[command(flatten)]
    walk: WalkArgs,
    /// Lattice spacing.
    #[arg(long)]
    dx: Option<f64>,
    /// Trap position.
    #[arg(long)]
    trap: Option<f64>,
    /// Single start point (JSON result); otherwise a scan.
    #[arg(long)]
    x: Option<f64>,
    /// Scan points on [0, 1].
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug)]
struct CircleArgs {
    #[command(flatten)]
    walk: WalkArgs,
    #[arg(long)]
    dtheta: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    /// Single start angle (JSON result); otherwise a scan.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug)]
struct DiskArgs {
    #[command(flatten)]
    walk: WalkArgs,
    #[command(flatten)]
    trap: TrapArgs,
    /// Lattice spacing.
    #[arg(long)]
    dl: Option<f64>,
    /// Single start point, with --y (JSON result); otherwise a grid scan.
    #[arg(long, requires = "y")]
    x: Option<f64>,
    #[arg(long, requires = "x", allow_negative_numbers = true)]
    y: Option<f64>,
    /// Cells per side of the square scan grid.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args, Debug)]
struct TrapArgs {
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
}

#[derive(Args, Debug)]
struct FieldArgs {
    #[command(flatten)]
    trap: TrapArgs,
    /// `series` or `large-omega`.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    ntheta: Option<usize>,
}

#[derive(Args, Debug)]
struct MassCurveArgs {
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    r0_min: Option<f64>,
    #[arg(long)]
    r0_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug)]
struct OptimumArgs {
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args, Debug)]
struct BifurcationArgs {
    /// Search bracket for the critical angular velocity.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    bracket: Option<Vec<f64>>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct U0Args {
    /// Minimum boundary nodes of the inner solver.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    s0_min: Option<f64>,
    #[arg(long)]
    s0_max: Option<f64>,
    #[arg(long)]
    s0_count: Option<usize>,
}

#[derive(Args, Debug)]
struct SpeedArgs {
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    s_min: Option<f64>,
    #[arg(long)]
    s_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut res = Resolver::new(cli.config.as_deref())?;
    let threads = res.get_with_env("threads", cli.threads, THREADS_ENV, 0usize)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {threads} threads: {e}")))?;
    }
    let report = commands::execute(&cli.command, &mut res)?;
    if !cli.quiet {
        for line in res.echo_lines() {
            eprintln!("resolved {line}");
        }
    }
    for k in res.unused_keys() {
        log::warn!("config key `{k}` is not used by this command");
    }
    let format = cli.format.unwrap_or_else(|| report.payload.default_format());
    let text = render(&report, format);
    match &cli.output {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rotrap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
