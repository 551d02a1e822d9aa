//! Experiment configuration: flags and JSON files share one flat schema
//! (`docs/config.schema.json`). A file overrides flags key by key; the
//! resolved view, with every default filled in, is what gets hashed and
//! recorded.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use freecap::entropy::Metric;
use freecap::microstates::MicrostateSpec;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{config_err, CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Capacity,
    Eqmeasure,
    GueNorms,
    GammaMeasure,
    Volume,
    Covering,
    Dimension,
    HtCheck,
    TracePinning,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Capacity => "capacity",
            Command::Eqmeasure => "eqmeasure",
            Command::GueNorms => "gue-norms",
            Command::GammaMeasure => "gamma-measure",
            Command::Volume => "volume",
            Command::Covering => "covering",
            Command::Dimension => "dimension",
            Command::HtCheck => "ht-check",
            Command::TracePinning => "trace-pinning",
        }
    }

    /// Parameters the command reads, besides `command` and `seed`.
    fn parameters(self) -> &'static [&'static str] {
        const SPEC: [&str; 8] = ["preset", "spec", "spec_file", "degree", "k", "eps", "samples", "radius"];
        match self {
            Command::Capacity => &["intervals", "grid"],
            Command::Eqmeasure => &["intervals", "reference", "grid"],
            Command::GueNorms => &["n", "poly", "dims", "trials"],
            Command::HtCheck => &["n", "poly", "dims", "trials", "target"],
            Command::GammaMeasure => &SPEC[..7],
            Command::Volume => &["preset", "spec", "spec_file", "degree", "k", "eps", "samples", "radius", "estimator"],
            Command::Covering => &["k", "radius", "eps", "samples", "metric"],
            Command::Dimension => &["preset", "spec", "spec_file", "degree", "k", "eps", "samples", "metric"],
            Command::TracePinning => &["k", "eps", "samples"],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorChoice {
    Ball,
    Gaussian,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MetricChoice {
    Uniform,
    Hs,
}

impl From<MetricChoice> for Metric {
    fn from(m: MetricChoice) -> Metric {
        match m {
            MetricChoice::Uniform => Metric::Uniform,
            MetricChoice::Hs => Metric::Hs,
        }
    }
}

/// Every parameter of every command. Unset fields are omitted from JSON.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,

    /// Master seed; every stochastic output is a function of it.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Union of closed intervals, e.g. "[-1,1]" or "[0,1],[2,3]".
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<String>,

    /// Reference density instead of an equilibrium problem:
    /// "semicircle:center,variance" or "arcsine:a,b".
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,

    /// Grid size for measures on the line.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,

    /// Number of self-adjoint variables.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,

    /// Noncommutative polynomial in X1..Xn, e.g. "X1+X2".
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,

    /// Matrix sizes for GUE norm experiments.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,

    /// Trials per matrix size.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,

    /// Limiting norm to compare against (default: 2|c| for linear polynomials).
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,

    /// Preset spec: "semicircular[:n]", "interval:a,b" or "ball[:R]".
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,

    /// Path to a microstate spec in JSON; inlined as `spec` when resolved.
    #[arg(long = "spec")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_file: Option<PathBuf>,

    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<MicrostateSpec>,

    /// Chebyshev degree for interval presets.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,

    /// Matrix sizes.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,

    /// Tolerances or covering scales.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,

    /// Ball radius for sampling or covering.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,

    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorChoice>,

    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricChoice>,
}

pub const MAX_SAMPLES: u64 = 100_000_000;
pub const MAX_GRID: usize = 20_000;
pub const MAX_GUE_DIM: usize = 2_000;
pub const MAX_SAMPLED_DIM: usize = 2_000;
pub const MAX_ARITY: usize = 8;
pub const MAX_TRIALS: u64 = 10_000;
pub const MAX_DEGREE: usize = 8;

fn to_object(cfg: &ExperimentConfig) -> Map<String, Value> {
    match serde_json::to_value(cfg).expect("config serializes") {
        Value::Object(m) => m,
        _ => unreachable!("config is a struct"),
    }
}

/// Parse a config file; unknown keys are rejected.
pub fn load_file(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

/// Overlay `file` on `flags`. Returns the merged config and one note per
/// flag the file overrode with a different value.
pub fn merge(flags: &ExperimentConfig, file: &ExperimentConfig) -> Result<(ExperimentConfig, Vec<String>)> {
    let mut merged = to_object(flags);
    let mut notes = Vec::new();
    for (key, value) in to_object(file) {
        if let Some(old) = merged.get(&key) {
            if *old != value {
                notes.push(format!("config file overrides flag `{key}`: {old} -> {value}"));
            }
        }
        merged.insert(key, value);
    }
    let cfg = serde_json::from_value(Value::Object(merged)).map_err(|e| config_err(e.to_string()))?;
    Ok((cfg, notes))
}

fn need<T: Clone>(value: &Option<T>, name: &str, cmd: Command) -> Result<T> {
    value.clone().ok_or_else(|| config_err(format!("`{}` requires `{name}`", cmd.name())))
}

fn check_range<T: PartialOrd + std::fmt::Display>(name: &str, v: T, lo: T, hi: T) -> Result<()> {
    if v < lo || v > hi {
        return Err(config_err(format!("`{name}` must lie in [{lo}, {hi}], got {v}")));
    }
    Ok(())
}

fn check_list<T: PartialOrd + std::fmt::Display + Copy>(name: &str, vs: &[T], lo: T, hi: T) -> Result<()> {
    if vs.is_empty() {
        return Err(config_err(format!("`{name}` is empty")));
    }
    vs.iter().try_for_each(|&v| check_range(name, v, lo, hi))
}

fn check_eps(vs: &[f64]) -> Result<()> {
    if vs.is_empty() || vs.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(config_err("every `eps` must be positive and finite"));
    }
    Ok(())
}

impl ExperimentConfig {
    fn set_keys(&self) -> Vec<String> {
        to_object(self).keys().cloned().collect()
    }

    /// Fill defaults, inline a spec file, and check every bound. The result
    /// is the canonical form of the experiment.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let cmd = self.command.ok_or_else(|| config_err("no command given"))?;
        let allowed = cmd.parameters();
        if let Some(bad) =
            self.set_keys().into_iter().find(|key| key != "command" && key != "seed" && !allowed.contains(&key.as_str()))
        {
            return Err(config_err(format!("parameter `{bad}` is not used by `{}`", cmd.name())));
        }
        let mut r = self.clone();
        r.seed.get_or_insert(0);
        match cmd {
            Command::Capacity | Command::Eqmeasure => {
                if cmd == Command::Capacity || r.reference.is_none() {
                    need(&r.intervals, "intervals", cmd)?;
                }
                if r.intervals.is_some() && r.reference.is_some() {
                    return Err(config_err("give either `intervals` or `reference`, not both"));
                }
                check_range("grid", *r.grid.get_or_insert(2000), freecap::potential::MIN_GRIDSIZE, MAX_GRID)?;
            }
            Command::GueNorms | Command::HtCheck => {
                let n = *r.n.get_or_insert(1);
                check_range("n", n, 1, MAX_ARITY)?;
                r.poly.get_or_insert_with(|| "X1".into());
                check_list("dims", &need(&r.dims, "dims", cmd)?, 1, MAX_GUE_DIM)?;
                check_range("trials", *r.trials.get_or_insert(20), 1, MAX_TRIALS)?;
                if let Some(t) = r.target {
                    if !(t.is_finite() && t >= 0.0) {
                        return Err(config_err("`target` must be finite and nonnegative"));
                    }
                }
            }
            Command::GammaMeasure | Command::Volume | Command::Dimension => {
                if let Some(path) = r.spec_file.take() {
                    if r.spec.is_some() {
                        return Err(config_err("give either `spec` or `spec_file`, not both"));
                    }
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| config_err(format!("reading spec {}: {e}", path.display())))?;
                    r.spec = Some(MicrostateSpec::from_json(&text)?);
                }
                match (&r.preset, &r.spec) {
                    (Some(_), Some(_)) => return Err(config_err("give either `preset` or `spec`, not both")),
                    (None, None) => return Err(config_err(format!("`{}` requires `preset` or `spec`", cmd.name()))),
                    (Some(p), None) if p.starts_with("interval") => {
                        check_range("degree", *r.degree.get_or_insert(freecap::presets::DEFAULT_CHEBYSHEV_DEGREE), 1, MAX_DEGREE)?;
                    }
                    _ if r.degree.is_some() => return Err(config_err("`degree` only applies to interval presets")),
                    _ => {}
                }
                if let Some(spec) = &r.spec {
                    r.k.get_or_insert_with(|| vec![spec.k()]);
                    r.eps.get_or_insert_with(|| vec![spec.epsilon()]);
                }
                if cmd == Command::Dimension {
                    r.k.get_or_insert_with(|| vec![1, 2, 3]);
                    let eps = need(&r.eps, "eps", cmd)?;
                    check_eps(&eps)?;
                    if eps.len() < 3 || eps.windows(2).any(|w| w[1] >= w[0]) {
                        return Err(config_err("`dimension` needs at least three strictly decreasing `eps`"));
                    }
                    r.metric.get_or_insert(MetricChoice::Uniform);
                    check_range("samples", *r.samples.get_or_insert(3000), 1, MAX_SAMPLES)?;
                } else {
                    let eps = need(&r.eps, "eps", cmd)?;
                    check_eps(&eps)?;
                    if eps.len() != 1 {
                        return Err(config_err(format!("`{}` takes a single `eps`", cmd.name())));
                    }
                    let default = if cmd == Command::Volume { 100_000 } else { 200 };
                    check_range("samples", *r.samples.get_or_insert(default), 1, MAX_SAMPLES)?;
                }
                if cmd == Command::Volume {
                    r.estimator.get_or_insert(EstimatorChoice::Both);
                }
                let cap = if cmd == Command::GammaMeasure { MAX_SAMPLED_DIM } else { freecap::randmat::BALL_DIM_CAP };
                check_list("k", &need(&r.k, "k", cmd)?, 1, cap)?;
                if let Some(radius) = r.radius {
                    if !(radius.is_finite() && radius > 0.0) {
                        return Err(config_err("`radius` must be positive and finite"));
                    }
                }
            }
            Command::Covering => {
                check_list("k", &need(&r.k, "k", cmd)?, 1, freecap::randmat::BALL_DIM_CAP)?;
                let radius = *r.radius.get_or_insert(1.0);
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(config_err("`radius` must be positive and finite"));
                }
                let eps = need(&r.eps, "eps", cmd)?;
                check_eps(&eps)?;
                if eps.iter().any(|&e| e > radius) {
                    return Err(config_err("every `eps` must be at most `radius`"));
                }
                check_range("samples", *r.samples.get_or_insert(4000), 1, MAX_SAMPLES)?;
                r.metric.get_or_insert(MetricChoice::Uniform);
            }
            Command::TracePinning => {
                check_list("k", &need(&r.k, "k", cmd)?, 1, MAX_SAMPLED_DIM)?;
                let eps = r.eps.get_or_insert_with(|| vec![0.5]).clone();
                check_eps(&eps)?;
                if eps.len() != 1 {
                    return Err(config_err("`trace-pinning` takes a single `eps`"));
                }
                check_range("samples", *r.samples.get_or_insert(1000), 1, MAX_SAMPLES)?;
            }
        }
        Ok(r)
    }

    /// SHA-256 of the canonical JSON of a resolved config.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

impl std::str::FromStr for Command {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        <Command as ValueEnum>::from_str(s, false).map_err(|_| config_err(format!("unknown command {s:?}")))
    }
}
