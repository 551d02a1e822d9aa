use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{config_err, CliError, Result};
use crate::run::{run, Outcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    /// Relative to the run directory.
    pub path: String,
    pub sha256: String,
    pub rows: usize,
}

/// Everything needed to audit or repeat a run. Only `wall_clock_seconds`
/// differs between reruns of the same config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub config_hash: String,
    pub tool: String,
    pub tool_version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub wall_clock_seconds: f64,
    pub results: Value,
    pub outputs: Vec<OutputFile>,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }
}

/// First free directory among `base`, `base-2`, `base-3`, ...
fn fresh_dir(base: PathBuf) -> PathBuf {
    if !base.exists() {
        return base;
    }
    let name = base.file_name().and_then(|s| s.to_str()).unwrap_or("run").to_string();
    (2..)
        .map(|i| base.with_file_name(format!("{name}-{i}")))
        .find(|p| !p.exists())
        .expect("unbounded search")
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

/// Resolve, run and persist. `workers = None` uses rayon's default pool.
/// Returns the run directory and the manifest written there.
pub fn execute(cfg: &ExperimentConfig, outdir: &Path, workers: Option<usize>) -> Result<(PathBuf, Manifest)> {
    let resolved = cfg.resolve()?;
    let hash = resolved.hash();
    let command = resolved.command.expect("resolved config has a command");
    let start = Instant::now();
    let Outcome { results, tables, warnings } = match workers {
        Some(0) => return Err(config_err("`workers` must be at least 1")),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::io("starting worker pool", std::io::Error::other(e)))?
            .install(|| run(&resolved))?,
        None => run(&resolved)?,
    };
    let wall_clock_seconds = start.elapsed().as_secs_f64();

    let dir = fresh_dir(outdir.join(format!("{}-{}", command.name(), &hash[..16])));
    let data = dir.join("data");
    std::fs::create_dir_all(&data).map_err(|e| CliError::io(format!("creating {}", data.display()), e))?;
    let mut outputs = Vec::with_capacity(tables.len());
    for t in &tables {
        write(&data.join(&t.name), &t.bytes)?;
        outputs.push(OutputFile {
            path: format!("data/{}", t.name),
            sha256: hex::encode(Sha256::digest(&t.bytes)),
            rows: t.rows,
        });
    }
    let manifest = Manifest {
        config_hash: hash,
        tool: env!("CARGO_PKG_NAME").to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: resolved.seed.expect("resolved config has a seed"),
        config: resolved,
        wall_clock_seconds,
        results,
        outputs,
        warnings,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(&dir.join("manifest.json"), text.as_bytes())?;
    Ok((dir, manifest))
}

/// Rerun the config recorded in a manifest. Fails if the recorded hash does
/// not match the config, e.g. after hand edits.
pub fn replay(manifest: &Path, outdir: &Path, workers: Option<usize>) -> Result<(PathBuf, Manifest)> {
    let old = Manifest::load(manifest)?;
    let hash = old.config.resolve()?.hash();
    if hash != old.config_hash {
        return Err(config_err(format!(
            "manifest config hashes to {hash}, but the manifest records {}",
            old.config_hash
        )));
    }
    execute(&old.config, outdir, workers)
}
