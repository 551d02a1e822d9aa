//! Monte Carlo estimators for microstate sets: Gaussian measure, Lebesgue
//! volume (normalized as `k^{-2} log vol + (n/2) log k`), and covering
//! numbers.
//!
//! All estimators are finite-k quantities with standard errors. Estimators
//! draw samples by index from [`SamplerConfig`], so results depend only on
//! the seed, never on the thread count.

mod covering;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::MatrixTuple;
use crate::microstates::MicrostateSpec;
use crate::presets;
use crate::randmat::{log_ball_volume, log_c_k, SamplerConfig, BALL_DIM_CAP};

pub use covering::{
    ball_covering_bounds_check, delta_top_estimate, greedy_net, BallCoveringReport, CoveringEstimate, DeltaCell,
    DeltaTopReport, Metric, MIN_ACCEPTED,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeEstimator {
    BallHitRate,
    GaussianImportance,
}

/// Conditions attached to an estimate instead of an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateFlag {
    /// No sample landed in the set; the log-volume is reported as `-inf`.
    ZeroHits,
    /// Some main variable is unconstrained, so the set has infinite volume.
    Unbounded,
    /// The set is not contained in the sampling ball; the estimate is the
    /// volume of the intersection.
    Truncated,
    /// Importance weights are dominated by a few samples.
    LowEffectiveSampleSize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub k: usize,
    pub n: usize,
    /// Natural log of the estimated Lebesgue volume in `(M_k^sa)^n`.
    pub raw_log_vol: f64,
    /// `k^{-2} raw_log_vol + (n/2) log k`.
    pub normalized: f64,
    /// Standard error of `raw_log_vol` (delta method).
    pub std_error: f64,
    pub samples_used: u64,
    pub hits: u64,
    pub estimator: VolumeEstimator,
    pub flags: Vec<EstimateFlag>,
}

impl VolumeEstimate {
    fn new(k: usize, n: usize, raw_log_vol: f64, std_error: f64, samples: u64, hits: u64, est: VolumeEstimator) -> Self {
        VolumeEstimate {
            k,
            n,
            raw_log_vol,
            normalized: normalize(raw_log_vol, k, n),
            std_error,
            samples_used: samples,
            hits,
            estimator: est,
            flags: Vec::new(),
        }
    }

    /// Standard error of `normalized`.
    pub fn normalized_std_error(&self) -> f64 {
        self.std_error / (self.k * self.k) as f64
    }

    pub fn has_flag(&self, flag: EstimateFlag) -> bool {
        self.flags.contains(&flag)
    }
}

/// `k^{-2} raw + (n/2) log k`.
pub fn normalize(raw_log_vol: f64, k: usize, n: usize) -> f64 {
    raw_log_vol / (k * k) as f64 + 0.5 * n as f64 * (k as f64).ln()
}

/// Limits on volume estimation; hit rates decay like `exp(-c n k^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeOptions {
    pub max_k: usize,
    pub max_nk2: usize,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        VolumeOptions { max_k: BALL_DIM_CAP, max_nk2: 300 }
    }
}

impl VolumeOptions {
    fn check(&self, spec: &MicrostateSpec) -> Result<()> {
        let (k, n) = (spec.k(), spec.n());
        if k > self.max_k || n * k * k > self.max_nk2 {
            return Err(Error::Unsupported(format!(
                "volume estimation is limited to k <= {} and n k^2 <= {} (got k = {k}, n = {n})",
                self.max_k, self.max_nk2
            )));
        }
        Ok(())
    }
}

fn check_common(spec: &MicrostateSpec, samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(invalid("at least one sample is required"));
    }
    if spec.m() > 0 {
        return Err(Error::Unsupported(
            "estimators work on specs without presence variables (m = 0)".into(),
        ));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub k: usize,
    pub probability: f64,
    pub std_error: f64,
    pub hits: u64,
    pub samples: u64,
}

/// Gaussian measure `gamma_k` of the microstate set, by direct sampling.
pub fn estimate_gamma_measure(spec: &MicrostateSpec, samples: u64, seed: u64) -> Result<GammaEstimate> {
    check_common(spec, samples)?;
    let cfg = SamplerConfig::gaussian(spec.k(), spec.n(), seed)?;
    let hits = count_hits(&cfg, spec, samples)?;
    let p = hits as f64 / samples as f64;
    Ok(GammaEstimate {
        k: spec.k(),
        probability: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        hits,
        samples,
    })
}

/// `f(t)` for every sample `t` that is a microstate, `None` otherwise; in
/// sample order.
fn on_hits<T, F>(cfg: &SamplerConfig, spec: &MicrostateSpec, samples: u64, f: F) -> Result<Vec<Option<T>>>
where
    T: Send,
    F: Fn(&MatrixTuple) -> T + Sync + Send,
{
    cfg.par_map(samples, |_, t| Ok(spec.is_microstate(&t)?.then(|| f(&t)))).into_iter().collect()
}

fn count_hits(cfg: &SamplerConfig, spec: &MicrostateSpec, samples: u64) -> Result<u64> {
    Ok(on_hits(cfg, spec, samples, |_| ())?.iter().flatten().count() as u64)
}

/// Volume from the hit fraction of uniform samples in `B(k, R)^n`.
pub fn estimate_volume_ball(spec: &MicrostateSpec, radius: f64, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    estimate_volume_ball_with(spec, radius, samples, seed, VolumeOptions::default())
}

pub fn estimate_volume_ball_with(
    spec: &MicrostateSpec,
    radius: f64,
    samples: u64,
    seed: u64,
    opts: VolumeOptions,
) -> Result<VolumeEstimate> {
    check_common(spec, samples)?;
    opts.check(spec)?;
    let (k, n) = (spec.k(), spec.n());
    let cfg = SamplerConfig::uniform_ball(k, n, radius, seed)?;
    let hits = count_hits(&cfg, spec, samples)?;
    let p = hits as f64 / samples as f64;
    let (raw, se) = if hits == 0 {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        (p.ln() + log_ball_volume(k, n, radius), ((1.0 - p) / (p * samples as f64)).sqrt())
    };
    let mut est = VolumeEstimate::new(k, n, raw, se, samples, hits, VolumeEstimator::BallHitRate);
    if hits == 0 {
        est.flags.push(EstimateFlag::ZeroHits);
    }
    if !spec.containing_radius().is_some_and(|r| r <= radius) {
        est.flags.push(EstimateFlag::Truncated);
    }
    Ok(est)
}

/// Effective sample size below which importance estimates are flagged.
pub const MIN_EFFECTIVE_SAMPLES: f64 = 100.0;

/// Volume by importance sampling from the Gaussian measure:
/// `vol = E_gamma[1_Gamma exp((k/2) sum Tr A_j^2)] / c_k`.
pub fn estimate_volume_gaussian(spec: &MicrostateSpec, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    estimate_volume_gaussian_with(spec, samples, seed, VolumeOptions::default())
}

pub fn estimate_volume_gaussian_with(
    spec: &MicrostateSpec,
    samples: u64,
    seed: u64,
    opts: VolumeOptions,
) -> Result<VolumeEstimate> {
    check_common(spec, samples)?;
    opts.check(spec)?;
    let (k, n) = (spec.k(), spec.n());
    if spec.containing_radius().is_none() {
        let mut est =
            VolumeEstimate::new(k, n, f64::INFINITY, f64::INFINITY, samples, 0, VolumeEstimator::GaussianImportance);
        est.flags.push(EstimateFlag::Unbounded);
        return Ok(est);
    }
    let cfg = SamplerConfig::gaussian(k, n, seed)?;
    let half_k = 0.5 * k as f64;
    let hit_scores: Vec<f64> =
        on_hits(&cfg, spec, samples, |t| half_k * t.trace_square_sum())?.into_iter().flatten().collect();
    let hits = hit_scores.len() as u64;
    if hits == 0 {
        let mut est = VolumeEstimate::new(
            k,
            n,
            f64::NEG_INFINITY,
            f64::INFINITY,
            samples,
            0,
            VolumeEstimator::GaussianImportance,
        );
        est.flags.push(EstimateFlag::ZeroHits);
        return Ok(est);
    }
    let top = hit_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = hit_scores.iter().map(|s| (s - top).exp()).collect();
    let nf = samples as f64;
    let sum: f64 = w.iter().sum();
    let sum_sq: f64 = w.iter().map(|x| x * x).sum();
    let mean = sum / nf;
    // Variance over all samples, misses contributing zero weight.
    let var = (sum_sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
    let se = (var / nf).sqrt() / mean;
    let raw = top + mean.ln() - log_c_k(k, n);
    let mut est = VolumeEstimate::new(k, n, raw, se, samples, hits, VolumeEstimator::GaussianImportance);
    if sum * sum / sum_sq < MIN_EFFECTIVE_SAMPLES {
        est.flags.push(EstimateFlag::LowEffectiveSampleSize);
    }
    Ok(est)
}

/// `(n/2) log 2 pi - (n/2)(1 + delta)^2`.
pub fn semicircular_lower_bound(n: usize, delta: f64) -> Result<f64> {
    if n == 0 || !(delta >= 0.0) {
        return Err(invalid("semicircular lower bound needs n >= 1 and delta >= 0"));
    }
    let n = n as f64;
    Ok(0.5 * n * (2.0 * std::f64::consts::PI).ln() - 0.5 * n * (1.0 + delta).powi(2))
}

pub const PINNING_DELTAS: [f64; 3] = [0.05, 0.1, 0.2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePinningReport {
    pub k: usize,
    pub epsilon: f64,
    pub samples: u64,
    pub accepted: u64,
    /// `(delta, fraction of accepted samples with |k^{-1} Tr A^2 - 1| < delta)`;
    /// the fraction is `None` when nothing was accepted.
    pub fractions: Vec<(f64, Option<f64>)>,
    /// `k^{-1} Tr A^2` of every accepted sample, in sample order.
    pub values: Vec<f64>,
}

/// Distribution of `k^{-1} Tr A^2` over GUE samples that are microstates of
/// the one-variable semicircular preset.
pub fn trace_pinning_check(k: usize, epsilon: f64, samples: u64, seed: u64) -> Result<TracePinningReport> {
    let spec = presets::semicircular(1, k, epsilon, &[])?;
    check_common(&spec, samples)?;
    let cfg = SamplerConfig::gaussian(k, 1, seed)?;
    let values: Vec<f64> =
        on_hits(&cfg, &spec, samples, |t| t.component(0).trace_square() / k as f64)?.into_iter().flatten().collect();
    let accepted = values.len() as u64;
    let fractions = PINNING_DELTAS
        .iter()
        .map(|&d| {
            let inside = values.iter().filter(|v| (*v - 1.0).abs() < d).count();
            (d, (accepted > 0).then(|| inside as f64 / accepted as f64))
        })
        .collect();
    Ok(TracePinningReport { k, epsilon, samples, accepted, fractions, values })
}
