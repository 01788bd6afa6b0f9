use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use graded_darboux_cli::{run_path, RunOptions};

#[derive(Parser)]
#[command(name = "graded-darboux", version, about = "Homogeneous Darboux normal forms on graded charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a manifest.
    Run {
        manifest: PathBuf,
        /// Also write the JSON report here ("-" for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Print only the JSON report.
        #[arg(long)]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    let Command::Run { manifest, json, seed, samples, tol, quiet } = Cli::parse().command;
    let report = match run_path(&manifest, &RunOptions { seed, samples, tol }) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if !quiet {
        for r in &report.results {
            println!("{r}");
        }
    }
    match json.as_deref().map(|p| p.to_str() == Some("-")) {
        Some(true) => println!("{}", report.to_json()),
        Some(false) => {
            let path = json.unwrap();
            if let Err(e) = std::fs::write(&path, report.to_json() + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => {}
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
