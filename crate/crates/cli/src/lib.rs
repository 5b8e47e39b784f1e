//! The `qupid` command line: dataset generation, persistence computation, vectorization,
//! classification, importance export and timing benchmarks.

pub mod bench;
pub mod classify;
pub mod compute_pd;
pub mod config;
pub mod features;
pub mod generate;
pub mod importance;
pub mod vectorize;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::Serialize;

/// Bad invocation: unknown names, malformed values, invalid config files. Exits with code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(name = "qupid", version, about = "Quantized persistence diagram vectorization")]
pub struct Cli {
    /// Worker threads for per-item work (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset (orbit, patterns or graphs).
    Generate(generate::Args),
    /// Compute persistence diagrams for every cloud or graph of a dataset.
    ComputePd(compute_pd::Args),
    /// Fit grids on the training split and write feature vectors.
    Vectorize(vectorize::Args),
    /// Train and evaluate random forests on vectorized diagrams.
    Classify(classify::Args),
    /// Time quantization and transforms on synthetic diagrams.
    Bench(bench::Args),
    /// Export random-forest feature importances keyed by coefficient name.
    Importance(importance::Args),
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(UsageError("--jobs must be at least 1".into()).into());
        }
        // Ignored when a pool already exists (for instance when called twice in one process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match cli.command {
        Command::Generate(a) => generate::run(a),
        Command::ComputePd(a) => compute_pd::run(a),
        Command::Vectorize(a) => vectorize::run(a),
        Command::Classify(a) => classify::run(a),
        Command::Bench(a) => bench::run(a),
        Command::Importance(a) => importance::run(a),
    }
}

/// Parses `args`, runs the command and maps the outcome to an exit code
/// (0 success, 2 usage error, 1 runtime error).
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// Creates `dir`; a non-empty existing directory is an error unless `force`, in which case the
/// entries named in `owned` are removed first.
pub fn prepare_out_dir(dir: &Path, force: bool, owned: &[&str]) -> anyhow::Result<()> {
    if dir.exists() {
        let non_empty = fs::read_dir(dir)
            .with_context(|| format!("cannot read {}", dir.display()))?
            .next()
            .is_some();
        if non_empty && !force {
            anyhow::bail!("output directory {} is not empty (use --force to overwrite)", dir.display());
        }
        for name in owned {
            let p = dir.join(name);
            if p.is_dir() {
                fs::remove_dir_all(&p).with_context(|| format!("cannot remove {}", p.display()))?;
            } else if p.exists() {
                fs::remove_file(&p).with_context(|| format!("cannot remove {}", p.display()))?;
            }
        }
    }
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Turns a core error about names or values supplied by the user into a usage error.
pub fn usage<E: std::fmt::Display>(e: E) -> anyhow::Error {
    UsageError(e.to_string()).into()
}

/// Paths are echoed as given so that outputs do not depend on the working directory.
pub fn path_str(p: &Path) -> String {
    p.display().to_string()
}
