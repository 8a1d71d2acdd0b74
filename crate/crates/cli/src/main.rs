//! `ramkit` command-line tool.
//!
//! Exit status: 0 on success, 2 when a bound suite had inputs outside its hypotheses
//! (and nothing failed), 1 on errors and failed bounds.

mod commands;
mod manifest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::{Command, Outcome, Status};
use manifest::{sha256_hex, OutputDigest, RunManifest};

/// Directory for cached tree-walk tables.
pub const TABLE_CACHE_ENV: &str = "RAMKIT_TABLE_CACHE";

#[derive(Parser, Debug)]
#[command(name = "ramkit", version, about = "Spectral radius, cycle counts and walk statistics of regular graphs")]
struct Cli {
    /// Worker threads for parallel sweeps (0 = one per core). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Write a run manifest (arguments, seeds, output digests) to this path.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

fn run(cli: Cli, argv: Vec<String>) -> anyhow::Result<(Outcome, RunManifest)> {
    ramkit::parallel::set_workers(cli.workers);
    let subcommand = cli.command.name().to_string();
    let outcome = commands::execute(cli.command)?;
    let manifest = RunManifest {
        subcommand,
        argv,
        seeds: outcome.seeds.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        cache_keys: outcome.cache_keys.clone(),
        outputs: outcome
            .artifacts
            .iter()
            .map(|a| OutputDigest { name: a.path.as_ref().map_or("-".to_string(), |p| p.display().to_string()), sha256: sha256_hex(&a.bytes) })
            .collect(),
    };
    Ok((outcome, manifest))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Command::Replay { manifest } = &cli.command {
        return replay(manifest);
    }
    let manifest_path = cli.manifest.clone();
    let (outcome, manifest) = match run(cli, argv) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let mut stdout = std::io::stdout().lock();
    for a in &outcome.artifacts {
        let written = match &a.path {
            Some(p) => std::fs::write(p, &a.bytes).map_err(|e| format!("writing {}: {e}", p.display())),
            None => stdout.write_all(&a.bytes).map_err(|e| e.to_string()),
        };
        if let Err(e) = written {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    if let Some(path) = manifest_path {
        if let Err(e) = manifest.write(&path) {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    }
    match outcome.status {
        Status::Ok => ExitCode::SUCCESS,
        Status::NotApplicable(why) => {
            eprintln!("not applicable: {why}");
            ExitCode::from(2)
        }
        Status::Failed(why) => {
            eprintln!("failed: {why}");
            ExitCode::from(1)
        }
    }
}

/// `ramkit replay <manifest>`: reruns the recorded arguments without writing any
/// files and compares output digests.
fn replay(path: &PathBuf) -> ExitCode {
    let recorded = match RunManifest::read(path) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(&recorded.argv) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: recorded arguments no longer parse: {e}");
            return ExitCode::from(1);
        }
    };
    match run(cli, recorded.argv.clone()) {
        Ok((_, fresh)) if fresh.outputs == recorded.outputs => {
            println!("replay reproduced {} output(s)", fresh.outputs.len());
            ExitCode::SUCCESS
        }
        Ok((_, fresh)) => {
            for (a, b) in recorded.outputs.iter().zip(&fresh.outputs) {
                if a != b {
                    eprintln!("digest mismatch for {}: recorded {}, got {}", a.name, a.sha256, b.sha256);
                }
            }
            if recorded.outputs.len() != fresh.outputs.len() {
                eprintln!("recorded {} outputs, got {}", recorded.outputs.len(), fresh.outputs.len());
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
