//! Command-line front end: configuration, dispatch and report emission.

mod commands;
mod config;
mod report;

use clap::ValueEnum;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use commands::Command;
pub use config::{parse_config, parse_num, AnalysisConfig, Num, Tolerances};
pub use report::{to_canonical_json, to_text};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;

fn error_entry(e: &Error) -> Value {
    json!({
        "kind": if e.is_config_error() { "config" } else { "computation" },
        "message": e.to_string(),
    })
}

/// Runs `cmd` on a configuration document. Returns the full report and the
/// process exit code.
pub fn run_document(cmd: Command, text: &str, seed: Option<u64>) -> (Value, i32) {
    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    let outcome = parse_config(text).and_then(|cfg| {
        let seed = seed.or_else(|| cfg.params.get("seed").and_then(Value::as_u64));
        if cmd.needs_seed() && seed.is_none() {
            return Err(Error::Validation { field: "seed".into(), reason: format!("{} samples and needs --seed or params.seed", cmd.name()) });
        }
        commands::run(cmd, &cfg, seed).map(|r| (r, seed))
    });
    let (results, errors, seed_used, code) = match outcome {
        Ok((r, s)) => (r, Vec::new(), s, EXIT_OK),
        Err(e) => {
            let code = if e.is_config_error() { EXIT_CONFIG } else { EXIT_COMPUTATION };
            (Value::Null, vec![error_entry(&e)], seed, code)
        }
    };
    let report = json!({
        "command": cmd.name(),
        "input_digest": format!("sha256:{digest}"),
        "results": results,
        "errors": errors,
        "runtime": {
            "version": env!("CARGO_PKG_VERSION"),
            "seed": seed_used,
        },
    });
    (report, code)
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => to_canonical_json(report),
        Format::Text => to_text(report),
    }
}

/// Error report for a configuration file that could not be read.
pub fn unreadable(cmd: Command, path: &str, reason: &str) -> Value {
    let e = Error::Parse { path: path.to_string(), reason: reason.to_string() };
    json!({
        "command": cmd.name(),
        "input_digest": Value::Null,
        "results": Value::Null,
        "errors": [error_entry(&e)],
        "runtime": {"version": env!("CARGO_PKG_VERSION"), "seed": Value::Null},
    })
}
