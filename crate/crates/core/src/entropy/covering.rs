//! Covering numbers by farthest-point greedy nets.
//!
//! A farthest-point net stops when every point is within `eps` of a center;
//! its centers are pairwise more than `eps` apart, so its size is at most the
//! minimal number of `eps/2`-balls needed to cover the same points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{hs_metric, uniform_metric, MatrixTuple};
use crate::microstates::MicrostateSpec;
use crate::randmat::SamplerConfig;
use crate::rng::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `max_j ||A_j - B_j||`.
    Uniform,
    /// `(k^{-1} sum_j Tr (A_j - B_j)^2)^{1/2}`.
    Hs,
}

impl Metric {
    pub fn distance(self, a: &MatrixTuple, b: &MatrixTuple) -> Result<f64> {
        match self {
            Metric::Uniform => uniform_metric(a, b),
            Metric::Hs => hs_metric(a, b),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Metric::Uniform),
            "hs" => Ok(Metric::Hs),
            _ => Err(invalid(format!("unknown metric {s:?}; expected uniform or hs"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringEstimate {
    pub k: usize,
    pub epsilon: f64,
    pub net_size: usize,
    pub metric: Metric,
    /// `k^{-2} log net_size`.
    pub normalized: f64,
    /// Indices of the centers in the input, in selection order.
    pub centers: Vec<usize>,
}

/// Farthest-point greedy `eps`-net. Starts from the first point; ties go to
/// the lowest index.
pub fn greedy_net(points: &[MatrixTuple], epsilon: f64, metric: Metric) -> Result<CoveringEstimate> {
    let first = points.first().ok_or_else(|| invalid("greedy net needs at least one point"))?;
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let k = first.dim();
    let mut nearest = vec![f64::INFINITY; points.len()];
    let mut centers = Vec::new();
    let mut next = 0;
    loop {
        centers.push(next);
        let c = &points[next];
        let d: Vec<f64> = points.par_iter().map(|p| metric.distance(c, p)).collect::<Result<_>>()?;
        for (m, x) in nearest.iter_mut().zip(d) {
            *m = m.min(x);
        }
        let (far, &dist) = nearest
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        if dist <= epsilon {
            break;
        }
        next = far;
    }
    let net_size = centers.len();
    Ok(CoveringEstimate {
        k,
        epsilon,
        net_size,
        metric,
        normalized: (net_size as f64).ln() / (k * k) as f64,
        centers,
    })
}

/// Least-squares line `y = slope x + intercept`.
fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// A net is saturated when it uses more than this fraction of the points;
/// it then measures the sample size more than the set.
const SATURATION: f64 = 0.1;

fn saturated(net_size: usize, points: usize) -> bool {
    net_size as f64 > SATURATION * points as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallCoveringReport {
    pub k: usize,
    pub radius: f64,
    pub samples: u64,
    pub cells: Vec<CoveringEstimate>,
    /// Per cell: whether the net is saturated and left out of the fit.
    pub saturated: Vec<bool>,
    /// Fit of `log net_size` against `log(R/eps)` over unsaturated cells.
    pub slope: f64,
    pub intercept: f64,
    /// `slope / k^2`.
    pub exponent_ratio: f64,
    /// Smallest and largest `C` with `net_size = (C R / eps)^{k^2}` over the cells.
    pub c1: f64,
    pub c2: f64,
}

impl BallCoveringReport {
    /// Whether the fitted exponent is within 30% of `k^2`.
    pub fn exponent_within(&self, rel: f64) -> bool {
        (self.exponent_ratio - 1.0).abs() <= rel
    }
}

/// Greedy-net sizes of uniform samples of `B(k, R)` for several `eps`, and
/// the fitted covering exponent.
pub fn ball_covering_bounds_check(
    k: usize,
    radius: f64,
    eps_list: &[f64],
    samples: u64,
    seed: u64,
    metric: Metric,
) -> Result<BallCoveringReport> {
    if eps_list.iter().any(|&e| !(e > 0.0 && e <= radius)) {
        return Err(invalid("every epsilon must lie in (0, R]"));
    }
    if samples == 0 {
        return Err(invalid("at least one sample is required"));
    }
    let cfg = SamplerConfig::uniform_ball(k, 1, radius, seed)?;
    let points = cfg.par_map(samples, |_, t| t);
    let cells = eps_list.iter().map(|&e| greedy_net(&points, e, metric)).collect::<Result<Vec<_>>>()?;
    let sat: Vec<bool> = cells.iter().map(|c| saturated(c.net_size, points.len())).collect();
    let (x, y): (Vec<f64>, Vec<f64>) = cells
        .iter()
        .zip(&sat)
        .filter(|(_, &s)| !s)
        .map(|(c, _)| ((radius / c.epsilon).ln(), (c.net_size as f64).ln()))
        .unzip();
    let (slope, intercept) = if x.len() >= 2 { fit_line(&x, &y) } else { (f64::NAN, f64::NAN) };
    let k2 = (k * k) as f64;
    let cs: Vec<f64> = cells.iter().map(|c| (c.net_size as f64).powf(1.0 / k2) * c.epsilon / radius).collect();
    Ok(BallCoveringReport {
        k,
        radius,
        samples,
        cells,
        saturated: sat,
        slope,
        intercept,
        exponent_ratio: slope / k2,
        c1: cs.iter().copied().fold(f64::INFINITY, f64::min),
        c2: cs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Cells with fewer accepted samples than this are flagged and left out.
pub const MIN_ACCEPTED: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaCell {
    pub k: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub accepted: usize,
    pub net_size: Option<usize>,
    pub normalized: Option<f64>,
    /// Too few accepted samples, or a saturated net.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaTopReport {
    pub cells: Vec<DeltaCell>,
    pub epsilons: Vec<f64>,
    /// `D_eps`: max over unflagged cells of the k-grid, `None` if all are flagged.
    pub d_eps: Vec<Option<f64>>,
    /// Slope of `D_eps` against `|log eps|`; `NaN` with fewer than two values.
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<Option<f64>>,
    pub k_grid: Vec<usize>,
    /// The finite k-grid stands in for the limit superior in k.
    pub proxy: String,
}

/// Covering-dimension slope of the microstate sets produced by `family(k, eps)`.
///
/// Points are drawn uniformly from a ball containing the set (variables
/// without a coordinate constraint use the bound `M`), filtered by membership
/// and projected onto the main variables.
pub fn delta_top_estimate<F>(
    family: F,
    k_grid: &[usize],
    eps_grid: &[f64],
    samples: u64,
    seed: u64,
    metric: Metric,
) -> Result<DeltaTopReport>
where
    F: Fn(usize, f64) -> Result<MicrostateSpec>,
{
    if eps_grid.len() < 3 || eps_grid.windows(2).any(|w| !(w[1] < w[0])) || eps_grid.iter().any(|&e| !(e > 0.0)) {
        return Err(invalid("eps grid needs at least three positive, strictly decreasing values"));
    }
    if k_grid.is_empty() {
        return Err(invalid("k grid is empty"));
    }
    let mut cells = Vec::new();
    for (ei, &eps) in eps_grid.iter().enumerate() {
        for (ki, &k) in k_grid.iter().enumerate() {
            let spec = family(k, eps)?;
            if spec.k() != k {
                return Err(invalid(format!("family returned k = {} for requested k = {k}", spec.k())));
            }
            let cell_seed = derive_seed(seed, &[ki as u64, ei as u64]);
            let radius = (0..spec.arity())
                .map(|j| spec.coordinate_bound(j).unwrap_or(spec.radius_bound()))
                .fold(0.0, f64::max);
            let cfg = SamplerConfig::uniform_ball(k, spec.arity(), radius, cell_seed)?;
            let accepted: Vec<MatrixTuple> = cfg
                .par_map(samples, |_, t| -> Result<Option<MatrixTuple>> {
                    Ok(if spec.is_microstate(&t)? { Some(t.project(spec.n())?) } else { None })
                })
                .into_iter()
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            let mut cell = DeltaCell {
                k,
                epsilon: eps,
                seed: cell_seed,
                accepted: accepted.len(),
                net_size: None,
                normalized: None,
                flagged: true,
            };
            if accepted.len() >= MIN_ACCEPTED {
                let net = greedy_net(&accepted, eps, metric)?;
                cell.flagged = saturated(net.net_size, accepted.len());
                cell.net_size = Some(net.net_size);
                cell.normalized = Some(net.normalized);
            }
            cells.push(cell);
        }
    }
    let d_eps: Vec<Option<f64>> = eps_grid
        .iter()
        .map(|&e| {
            cells
                .iter()
                .filter(|c| c.epsilon == e && !c.flagged)
                .filter_map(|c| c.normalized)
                .reduce(f64::max)
        })
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) =
        eps_grid.iter().zip(&d_eps).filter_map(|(e, d)| d.map(|d| (e.ln().abs(), d))).unzip();
    let (slope, intercept) = if x.len() >= 2 { fit_line(&x, &y) } else { (f64::NAN, f64::NAN) };
    let residuals = eps_grid
        .iter()
        .zip(&d_eps)
        .map(|(e, d)| d.map(|d| d - (slope * e.ln().abs() + intercept)))
        .collect();
    Ok(DeltaTopReport {
        cells,
        epsilons: eps_grid.to_vec(),
        d_eps,
        slope,
        intercept,
        residuals,
        k_grid: k_grid.to_vec(),
        proxy: format!("max over k in {k_grid:?} in place of limsup"),
    })
}
