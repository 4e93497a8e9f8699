//! Command-line front end: `simulate`, `analyze`, `multirate` and `unfold`.
//!
//! Exit status is 0 on success, 1 for configuration or validation errors
//! and 2 for numeric failures at run time (overflow, missing boundary data).

pub mod format;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{analyze, AnalysisConfig};
use crate::error::{Error, Result};
use crate::multirate::trajectory_on_grid;
use crate::simulate::{simulate_continuous, simulate_discrete, InputSignal, Method};
use crate::system::TimeKind;

pub use format::{
    parse_system_file, parse_system_str, write_linear_system, write_multirate_system, write_system, LinearSystemFile,
    SystemFile,
};

#[derive(Parser, Debug)]
#[command(name = "tssr", version, about = "Simulate and analyze tensor state space systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a linear system file and write its trajectory as CSV.
    Simulate(SimulateArgs),
    /// Print stability, controllability and observability of a time-invariant system.
    Analyze(AnalyzeArgs),
    /// Evaluate a multirate system on its global clock and write CSV.
    Multirate(MultirateArgs),
    /// Write the equivalent order-1 system file of a linear system file.
    Unfold(UnfoldArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Number of steps (discrete systems).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Final time (continuous systems).
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    /// Sample spacing; defaults to t-end/1000.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, default_value = "exact")]
    pub method: String,
    /// Include output columns.
    #[arg(long = "emit-output")]
    pub emit_output: bool,
}

#[derive(Args, Debug, Clone)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub system: PathBuf,
    /// Relative singular value threshold for rank decisions.
    #[arg(long = "rank-tol")]
    pub rank_tol: Option<f64>,
    /// Half-width of the band reported as marginally stable.
    #[arg(long = "stability-eps")]
    pub stability_eps: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct MultirateArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Number of global clock ticks after n = 0.
    #[arg(long)]
    pub horizon: u64,
}

#[derive(Args, Debug, Clone)]
pub struct UnfoldArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn linear_file(path: &Path) -> Result<LinearSystemFile> {
    match parse_system_file(path)? {
        SystemFile::Linear(f) => Ok(f),
        SystemFile::Multirate(_) => Err(Error::argument(format!(
            "{} is a multirate system; use the multirate command",
            path.display()
        ))),
    }
}

fn positive(name: &str, value: Option<f64>) -> Result<Option<f64>> {
    match value {
        Some(v) if !(v.is_finite() && v > 0.0) => Err(Error::argument(format!("--{name} must be positive, got {v}"))),
        other => Ok(other),
    }
}

/// Runs `simulate`, writes the CSV and returns the summary text.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<String> {
    let method: Method = args.method.parse()?;
    let file = linear_file(&args.system)?;
    let system = &file.system;
    let trajectory = match system.time_kind() {
        TimeKind::Discrete => {
            if args.t_end.is_some() || args.h.is_some() {
                return Err(Error::argument(
                    "--t-end and --h apply to continuous systems; use --steps",
                ));
            }
            let steps = args
                .steps
                .ok_or_else(|| Error::argument("discrete systems need --steps"))?;
            simulate_discrete(system, &file.x0, &file.input, steps)?
        }
        TimeKind::Continuous => {
            if args.steps.is_some() {
                return Err(Error::argument("--steps applies to discrete systems; use --t-end"));
            }
            let t_end =
                positive("t-end", args.t_end)?.ok_or_else(|| Error::argument("continuous systems need --t-end"))?;
            let h = positive("h", args.h)?;
            simulate_continuous(system, &file.x0, &file.input, t_end, h, method)?
        }
    };
    write_file(
        &args.out,
        &output::trajectory_csv(system, &trajectory, args.emit_output),
    )?;
    let norm = trajectory.final_state().map_or(0.0, |s| s.norm());
    Ok(format!(
        "steps: {}\nterminal_state_norm: {}\n",
        trajectory.len() - 1,
        output::format_number(norm)
    ))
}

/// Runs `analyze` and returns the report text.
pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<String> {
    let mut config = AnalysisConfig::default();
    if let Some(tol) = positive("rank-tol", args.rank_tol)? {
        config.rank_tolerance = tol;
    }
    if let Some(eps) = positive("stability-eps", args.stability_eps)? {
        config.stability_margin = eps;
    }
    let file = linear_file(&args.system)?;
    Ok(output::render_report(&analyze(&file.system, &config)?))
}

/// Runs `multirate`, writes the CSV and returns the summary text.
pub fn cmd_multirate(args: &MultirateArgs) -> Result<String> {
    let system = match parse_system_file(&args.system)? {
        SystemFile::Multirate(m) => m,
        SystemFile::Linear(_) => {
            return Err(Error::argument(format!(
                "{} is not a multirate system",
                args.system.display()
            )))
        }
    };
    let rows = trajectory_on_grid(&system, args.horizon)?;
    let clock = system.global_clock();
    write_file(&args.out, &output::multirate_csv(clock, &rows))?;
    Ok(format!("global_period: {}\nticks: {}\n", clock.period, rows.len()))
}

/// Runs `unfold`, writing the order-1 twin of a linear system file.
pub fn cmd_unfold(args: &UnfoldArgs) -> Result<String> {
    let file = linear_file(&args.system)?;
    let system = file.system.unfolded()?;
    let input = match &file.input {
        InputSignal::Zero => InputSignal::Zero,
        InputSignal::Constant(t) => InputSignal::Constant(t.vec()),
        InputSignal::Table(s) => InputSignal::Table(s.iter().map(|(k, t)| (*k, t.vec())).collect()),
    };
    let twin = LinearSystemFile {
        x0: file.x0.vec(),
        input,
        system,
    };
    write_file(&args.out, &write_linear_system(&twin))?;
    Ok(format!("state_dim: {}\n", twin.system.state_dim()))
}

pub fn execute(command: &Command) -> Result<String> {
    match command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Multirate(a) => cmd_multirate(a),
        Command::Unfold(a) => cmd_unfold(a),
    }
}

/// Parses arguments, runs the command, prints results and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
