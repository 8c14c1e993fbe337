//! Experiment drivers behind the `skqd` binary: JSON configs in, CSV tables
//! and a manifest out.

pub mod config;
pub mod runners;
pub mod siam;
pub mod table;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

pub use config::ExperimentConfig;
pub use runners::{ResultRow, RunOutput, RESULT_HEADER};
pub use table::{Cell, Table};

use crate::{Error, Result};

/// Environment variable consulted for the worker count when none is given.
pub const THREADS_ENV: &str = "SKQD_THREADS";

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub threads: Option<usize>,
    pub seed_override: Option<u64>,
}

impl RunOptions {
    /// Explicit count, else `SKQD_THREADS`, else the rayon default.
    pub fn resolved_threads(&self) -> Result<Option<usize>> {
        if let Some(t) = self.threads {
            return Ok(Some(t));
        }
        match std::env::var(THREADS_ENV) {
            Ok(s) if !s.trim().is_empty() => s
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("{THREADS_ENV}={s} is not a count"))),
            _ => Ok(None),
        }
    }
}

/// Execute a configuration on a dedicated worker pool.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<(ExperimentConfig, RunOutput)> {
    let config = match opts.seed_override {
        Some(s) => config.clone().with_seed(s),
        None => config.clone(),
    };
    config.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = opts.resolved_threads()? {
        if t == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Error::Config(e.to_string()))?;
    let out = pool.install(|| match &config {
        ExperimentConfig::BenchTfim(c) => runners::bench_tfim(c),
        ExperimentConfig::Kqd(c) => runners::kqd_sweep(c),
        ExperimentConfig::Skqd(c) => runners::skqd_sweep(c),
        ExperimentConfig::Siam(c) => runners::siam_sweep(c),
        ExperimentConfig::VerifyBounds(c) => runners::verify_bounds(c),
        ExperimentConfig::SparsityE(c) => runners::sparsity_sweep(c),
    })?;
    Ok((config, out))
}

/// Run and write `<kind>.csv`, `<kind>.manifest.json`, and when produced
/// `<kind>.correlations.csv` and `<kind>.report.json` into `dir`.
pub fn run_to_dir(
    config: &ExperimentConfig,
    opts: &RunOptions,
    dir: &Path,
) -> Result<(RunOutput, Vec<PathBuf>)> {
    let start = Instant::now();
    let (effective, out) = run(config, opts)?;
    let wall = start.elapsed().as_secs_f64();
    std::fs::create_dir_all(dir)?;
    let kind = effective.kind();
    let mut files = Vec::new();
    let write = |files: &mut Vec<PathBuf>, name: String, bytes: Vec<u8>| -> Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, bytes)?;
        files.push(p);
        Ok(())
    };
    write(
        &mut files,
        format!("{kind}.csv"),
        out.table.to_csv_string().into_bytes(),
    )?;
    if let Some(c) = &out.correlations {
        write(
            &mut files,
            format!("{kind}.correlations.csv"),
            c.to_csv_string().into_bytes(),
        )?;
    }
    if let Some(r) = &out.report {
        write(
            &mut files,
            format!("{kind}.report.json"),
            serde_json::to_vec_pretty(r)?,
        )?;
    }
    let names: Vec<String> = files
        .iter()
        .filter_map(|p| p.file_name().map(|s| s.to_string_lossy().into_owned()))
        .collect();
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "kind": kind,
        "config": effective,
        "seed_override": opts.seed_override,
        "threads": opts.resolved_threads()?,
        "derived": out.derived,
        "violations": out.violations,
        "rows": out.table.rows.len(),
        "files": names,
        "wall_clock_seconds": wall,
    });
    write(
        &mut files,
        format!("{kind}.manifest.json"),
        serde_json::to_vec_pretty(&manifest)?,
    )?;
    Ok((out, files))
}

/// Rebuild the configuration recorded in a manifest.
pub fn config_from_manifest(text: &str) -> Result<ExperimentConfig> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    let cfg = v
        .get("config")
        .ok_or_else(|| Error::Config("manifest has no config".into()))?;
    let cfg: ExperimentConfig =
        serde_json::from_value(cfg.clone()).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
