//! `corrpoll`: league protocol comparisons, ambiguity bounds, schedule
//! search, and polling simulation, all emitting line-oriented JSON.
//!
//! Exit codes: 0 on success, 1 when a run completes but an internal
//! cross-check fails (simulator/analytic mismatch, greedy/brute
//! disagreement, out-of-tolerance Monte Carlo), 2 on usage or input errors.

mod commands;

use clap::{Parser, Subcommand, ValueEnum};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "corrpoll", version, about = "Interactive polling of correlated informants")]
struct Cli {
    /// Write output lines to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// RNG seed for data generation and sampling.
    #[arg(long, global = true, env = "CORRPOLL_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the three league announcement protocols.
    League {
        /// Number of groups (>= 2).
        #[arg(long)]
        groups: u32,
        /// Teams per group (>= 1).
        #[arg(long)]
        teams: u32,
        /// Decode every possible match under all three protocols.
        #[arg(long)]
        exhaustive: bool,
        /// Emit per-message transcript lines for a sample match.
        #[arg(long)]
        transcripts: bool,
    },
    /// Ambiguity reports for the four league support sets.
    Ambiguity {
        #[arg(long)]
        groups: u32,
        #[arg(long)]
        teams: u32,
    },
    /// Evaluate and optimize polling schedules for a field.
    Schedule {
        /// Field description file (JSON).
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MethodArg::Greedy)]
        method: MethodArg,
        /// Greedy start node.
        #[arg(long, default_value_t = 1)]
        start: u32,
        /// Node-count cap for exhaustive search.
        #[arg(long)]
        brute_limit: Option<usize>,
        /// Write a (schedule, cost) table, or the correlation curve, as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Emit the bits-versus-distance curve instead of a schedule report.
        #[arg(long)]
        emit_correlation_curve: bool,
        /// Word length for the curve when no field file is given.
        #[arg(long)]
        word_length: Option<u32>,
    },
    /// Simulate polling rounds against a field.
    Simulate {
        #[arg(long)]
        field: PathBuf,
        /// Explicit schedule as comma-separated node ids; defaults to the
        /// greedy schedule.
        #[arg(long)]
        schedule: Option<String>,
        /// Greedy start node when no explicit schedule is given.
        #[arg(long, default_value_t = 1)]
        start: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Worst)]
        mode: ModeArg,
        /// Monte Carlo trials in average mode.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Per-step pattern distributions (JSON array of arrays) for
        /// average mode; uniform when absent.
        #[arg(long)]
        patterns: Option<PathBuf>,
        /// Emit per-message transcript lines (worst mode).
        #[arg(long)]
        transcripts: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Greedy,
    Brute,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Worst,
    Average,
}

/// A command's output lines plus whether its internal cross-checks held.
pub struct Outcome {
    pub lines: Vec<String>,
    pub checks_ok: bool,
}

/// Usage and input problems; rendered to stderr with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::League {
            groups,
            teams,
            exhaustive,
            transcripts,
        } => commands::league(groups, teams, exhaustive, transcripts),
        Command::Ambiguity { groups, teams } => commands::ambiguity(groups, teams),
        Command::Schedule {
            field,
            method,
            start,
            brute_limit,
            csv,
            emit_correlation_curve,
            word_length,
        } => commands::schedule(
            field.as_deref(),
            method,
            start,
            brute_limit,
            csv.as_deref(),
            emit_correlation_curve,
            word_length,
        ),
        Command::Simulate {
            field,
            schedule,
            start,
            mode,
            trials,
            patterns,
            transcripts,
        } => commands::simulate(
            &field,
            schedule.as_deref(),
            start,
            mode,
            trials,
            patterns.as_deref(),
            transcripts,
            cli.seed,
        ),
    };

    match outcome {
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Ok(outcome) => {
            let write_result = match cli.output {
                Some(path) => File::create(&path)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))
                    .and_then(|f| emit(BufWriter::new(f), &outcome.lines)),
                None => emit(io::stdout().lock(), &outcome.lines),
            };
            if let Err(err) = write_result {
                eprintln!("error: {err}");
                return ExitCode::from(2);
            }
            if outcome.checks_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn emit<W: Write>(mut w: W, lines: &[String]) -> Result<(), String> {
    for line in lines {
        writeln!(w, "{line}").map_err(|e| format!("write failed: {e}"))?;
    }
    w.flush().map_err(|e| format!("write failed: {e}"))
}
