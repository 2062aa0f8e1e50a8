use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use retrieval::runner::{exit, render_text};
use retrieval::verify::verify_report;
use retrieval::{parse_input, run, RunConfig, RunOptions};
use retrieval_core::scalar::{Mode, DEFAULT_EPS};

/// Decides phase and norm retrieval for frames and fusion frames.
///
/// Vectors are read exactly as integers, decimals or `p/q` strings. Entries
/// with square roots, such as (e1 - e2)/sqrt(2), should be given by any
/// rational multiple of the vector, e.g. ["1", "-1"]: spans, projections and
/// every retrieval property are unchanged by nonzero rescaling.
#[derive(Parser)]
#[command(name = "retrieval", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Re-check every certificate of a saved report against its input.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Args)]
struct RunArgs {
    /// Run file (JSON).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Float tolerance; implies nothing in exact mode.
    #[arg(long)]
    eps: Option<f64>,
    /// Falsifier trials for fusion tasks.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; the report does not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Also print a text summary to stderr.
    #[arg(long)]
    pretty: bool,
    /// Largest frame size for exhaustive subset sweeps.
    #[arg(long)]
    max_subset_bits: Option<usize>,
    /// Record per-task wall-clock time (reports stop being reproducible).
    #[arg(long)]
    timings: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn read(path: &PathBuf) -> Result<Vec<u8>, ExitCode> {
    std::fs::read(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(exit::PARSE_ERROR as u8)
    })
}

fn load(path: &PathBuf) -> Result<(Vec<u8>, RunConfig), ExitCode> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| {
        eprintln!("error: {} is not UTF-8", path.display());
        ExitCode::from(exit::PARSE_ERROR as u8)
    })?;
    let config = parse_input(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(exit::PARSE_ERROR as u8)
    })?;
    Ok((bytes, config))
}

fn apply_overrides(config: &mut RunConfig, a: &RunArgs) {
    let eps = a.eps.or(match config.mode {
        Mode::Float { eps } => Some(eps),
        Mode::Exact => None,
    });
    match a.mode {
        Some(ModeArg::Exact) => config.mode = Mode::Exact,
        Some(ModeArg::Float) => {
            config.mode = Mode::Float {
                eps: eps.unwrap_or(DEFAULT_EPS),
            }
        }
        None => {
            if let (Mode::Float { .. }, Some(eps)) = (config.mode, a.eps) {
                config.mode = Mode::Float { eps };
            }
        }
    }
    if let Some(t) = a.trials {
        config.trials = t;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(j) = a.jobs {
        config.jobs = j.max(1);
    }
    if let Some(b) = a.max_subset_bits {
        config.max_members = b;
    }
}

fn run_command(a: RunArgs) -> Result<ExitCode, ExitCode> {
    let Some(path) = &a.input else {
        eprintln!("error: --input is required");
        return Err(ExitCode::from(exit::PARSE_ERROR as u8));
    };
    if a.eps.is_some_and(|e| !(e > 0.0 && e.is_finite())) {
        eprintln!("error: --eps must be positive");
        return Err(ExitCode::from(exit::PARSE_ERROR as u8));
    }
    let (bytes, mut config) = load(path)?;
    apply_overrides(&mut config, &a);
    let report = run(&config, &bytes, RunOptions { timings: a.timings });
    let mut text = serde_json::to_string_pretty(&report.json).expect("report serializes");
    text.push('\n');
    match &a.output {
        Some(out) => std::fs::write(out, &text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", out.display());
            ExitCode::from(exit::PARSE_ERROR as u8)
        })?,
        None => print!("{text}"),
    }
    if a.pretty {
        eprint!("{}", render_text(&report.json));
    }
    Ok(ExitCode::from(report.exit_code as u8))
}

fn verify_command(input: PathBuf, report: PathBuf) -> Result<ExitCode, ExitCode> {
    let (bytes, config) = load(&input)?;
    let report_bytes = read(&report)?;
    let value: serde_json::Value = serde_json::from_slice(&report_bytes).map_err(|e| {
        eprintln!("error: {}: {e}", report.display());
        ExitCode::from(exit::PARSE_ERROR as u8)
    })?;
    let outcome = verify_report(&config, &bytes, &value);
    for f in &outcome.failures {
        eprintln!("FAIL {f}");
    }
    println!(
        "{} certificates verified, {} without a compact check, {} failures",
        outcome.checked,
        outcome.skipped,
        outcome.failures.len()
    );
    Ok(if outcome.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(exit::VERIFY_FAILED as u8)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Some(Command::Verify { input, report }) => verify_command(input, report),
        None => run_command(cli.run),
    };
    result.unwrap_or_else(|code| code)
}
