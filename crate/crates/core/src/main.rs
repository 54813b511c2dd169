use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use markovflow::cli::{render, run_document, unreadable, Command, Format, EXIT_CONFIG};

/// Topological Markov shifts and flows: pressure, Gibbs measures,
/// arithmeticity classification, mixing and d-bar reports.
#[derive(Parser, Debug)]
#[command(name = "markovflow", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON configuration document.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Seed for sampling commands; overrides `params.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (report, code) = match std::fs::read_to_string(&args.config) {
        Ok(text) => run_document(args.command, &text, args.seed),
        Err(e) => (unreadable(args.command, &args.config.display().to_string(), &e.to_string()), EXIT_CONFIG),
    };
    print!("{}", render(&report, args.format));
    ExitCode::from(code as u8)
}
