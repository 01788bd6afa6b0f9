//! Batch front-end: read a JSON manifest, run its tasks, report.

pub mod commands;
pub mod manifest;
pub mod report;

use std::path::Path;

use graded_darboux::grexpr::EqualPolicy;
use thiserror::Error;

use commands::{Context, TaskError};
use manifest::Manifest;
use report::RunReport;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("manifest line {line}, column {column}: {msg}")]
    Schema { line: usize, column: usize, msg: String },
    #[error("{0}")]
    Config(String),
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: u64,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
}

pub fn run_manifest(text: &str, base_dir: &Path, opts: &RunOptions) -> Result<RunReport, CliError> {
    let ws = Manifest::parse(text)?.resolve()?;
    let policy = EqualPolicy::default().with_seed(opts.seed).with_samples(opts.samples.unwrap_or(32)).with_tol(opts.tol.unwrap_or(1e-9));
    let ctx = Context { ws: &ws, policy: policy.clone(), samples: opts.samples.unwrap_or(16), base_dir: base_dir.to_path_buf() };
    let results = ws
        .tasks
        .iter()
        .enumerate()
        .map(|(i, t)| {
            commands::run_task(&ctx, t).map_err(|e| match e {
                TaskError::Config(m) | TaskError::Failed(m) => CliError::Config(format!("task {i}: {m}")),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RunReport { seed: opts.seed, samples: policy.samples, tol: policy.tol, results })
}

pub fn run_path(path: &Path, opts: &RunOptions) -> Result<RunReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    run_manifest(&text, &dir, opts)
}
