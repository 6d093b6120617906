use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ris_cli::{load_scenario, run_command, CliError, Command, RunOptions};

/// Synthesize 1-bit RIS phase maps and evaluate their far-field patterns.
#[derive(Parser, Debug)]
#[command(name = "ris", version)]
struct Args {
    /// What to run.
    #[arg(value_enum)]
    command: Command,

    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,

    /// Output directory; overrides the scenario's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Sweep: keep the map synthesized at the design frequency.
    #[arg(long)]
    freeze_map: bool,

    /// Apply a cos(theta) element pattern to evaluated patterns.
    #[arg(long)]
    element_factor: bool,
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("RIS_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::validation(
                "RIS_THREADS",
                "must be a positive integer",
            )),
        },
    }
}

fn run(args: Args) -> Result<(), CliError> {
    let threads = thread_cap()?;
    let resolved = load_scenario(&args.scenario)?;
    let opts = RunOptions {
        out_dir: args.out,
        freeze_map: args.freeze_map,
        element_factor: args.element_factor,
    };
    let art =
        ris_core::exec::with_thread_cap(threads, || run_command(args.command, &resolved, &opts))?;
    for f in &art.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
