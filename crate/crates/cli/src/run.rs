//! One pipeline per command. Each returns the JSON results, the CSV tables
//! and the warnings raised along the way; nothing here touches the disk.

use freecap::entropy::{
    self, ball_covering_bounds_check, delta_top_estimate, estimate_gamma_measure, estimate_volume_ball,
    estimate_volume_gaussian, EstimateFlag, Metric, VolumeEstimate,
};
use freecap::microstates::MicrostateSpec;
use freecap::ncpoly::NCPolynomial;
use freecap::potential::{
    chi_one_var, equilibrium_measure, log_energy, reference_density, CapacityReport, RealCompact,
    ReferenceDensity, THETA,
};
use freecap::randmat::SamplerConfig;
use freecap::rng::derive_seed;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, EstimatorChoice, ExperimentConfig};
use crate::error::{config_err, CliError, Result};

pub struct Table {
    /// File name under `data/`.
    pub name: String,
    pub bytes: Vec<u8>,
    pub rows: usize,
}

pub struct Outcome {
    pub results: Value,
    pub tables: Vec<Table>,
    pub warnings: Vec<String>,
}

fn table<T: Serialize>(name: &str, rows: &[T]) -> Result<Table> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io("buffering CSV", e.into_error()))?;
    Ok(Table { name: name.to_string(), bytes, rows: rows.len() })
}

/// Seed for everything computed at matrix size `k`, so results for one `k`
/// do not depend on the rest of the grid.
fn seed_for(seed: u64, k: usize) -> u64 {
    derive_seed(seed, &[k as u64])
}

fn get<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| config_err(format!("missing `{name}` after resolution")))
}

/// Run a resolved config.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    match get(&cfg.command, "command")? {
        Command::Capacity => capacity(cfg),
        Command::Eqmeasure => eqmeasure(cfg),
        Command::GueNorms => gue_norms(cfg, false),
        Command::HtCheck => gue_norms(cfg, true),
        Command::GammaMeasure => gamma_measure(cfg),
        Command::Volume => volume(cfg),
        Command::Covering => covering(cfg),
        Command::Dimension => dimension(cfg),
        Command::TracePinning => trace_pinning(cfg),
    }
}

/// `"[a,b],[c,d]"`; whitespace is ignored.
pub fn parse_intervals(text: &str) -> Result<RealCompact> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || config_err(format!("cannot parse intervals {text:?}; expected e.g. \"[-1,1]\" or \"[0,1],[2,3]\""));
    let mut out = Vec::new();
    for piece in compact.split(']').filter(|p| !p.is_empty()) {
        let body = piece.strip_prefix(',').unwrap_or(piece).strip_prefix('[').ok_or_else(bad)?;
        let (a, b) = body.split_once(',').ok_or_else(bad)?;
        out.push((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?));
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(RealCompact::new(out)?)
}

fn parse_reference(text: &str) -> Result<ReferenceDensity> {
    let bad = || config_err(format!("cannot parse reference {text:?}; expected semicircle:c,v or arcsine:a,b"));
    let (name, args) = text.split_once(':').ok_or_else(bad)?;
    let (x, y) = args.split_once(',').ok_or_else(bad)?;
    let (x, y): (f64, f64) = (x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?);
    match name.trim() {
        "semicircle" => Ok(ReferenceDensity::Semicircle { center: x, variance: y }),
        "arcsine" => Ok(ReferenceDensity::Arcsine { a: x, b: y }),
        _ => Err(bad()),
    }
}

#[derive(Serialize)]
struct CapacityRow {
    capacity: f64,
    robin: f64,
    chi: f64,
    kappa: f64,
}

fn capacity(cfg: &ExperimentConfig) -> Result<Outcome> {
    let set = parse_intervals(&get(&cfg.intervals, "intervals")?)?;
    let grid = get(&cfg.grid, "grid")?;
    let mut warnings = Vec::new();
    if set.total_length() <= 0.0 {
        warnings.push("set has zero length: capacity is 0 and kappa is -inf".to_string());
        let row = CapacityRow { capacity: 0.0, robin: f64::NEG_INFINITY, chi: f64::NEG_INFINITY, kappa: f64::NEG_INFINITY };
        return Ok(Outcome {
            results: json!({ "capacity": 0.0, "robin": null, "chi": null, "kappa": null, "theta": THETA }),
            tables: vec![table("capacity.csv", &[row])?],
            warnings,
        });
    }
    let eq = equilibrium_measure(&set, grid)?;
    if !eq.report.converged {
        warnings.push(format!("equilibrium solver stopped at duality gap {:e}", eq.report.gap));
    }
    let r = CapacityReport::from_equilibrium(&eq);
    let row = CapacityRow { capacity: r.capacity, robin: r.robin, chi: r.chi, kappa: r.kappa };
    Ok(Outcome {
        results: json!({
            "capacity": r.capacity,
            "robin": r.robin,
            "chi": r.chi,
            "kappa": r.kappa,
            "theta": THETA,
            "solver": { "iterations": eq.report.iterations, "gap": eq.report.gap, "converged": eq.report.converged },
        }),
        tables: vec![table("capacity.csv", &[row])?],
        warnings,
    })
}

#[derive(Serialize)]
struct MeasureRow {
    x: f64,
    weight: f64,
    density: f64,
    /// Equilibrium potential, or the exact reference density.
    reference: f64,
}

fn eqmeasure(cfg: &ExperimentConfig) -> Result<Outcome> {
    let grid = get(&cfg.grid, "grid")?;
    let mut warnings = Vec::new();
    if let Some(text) = &cfg.reference {
        let density = parse_reference(text)?;
        let mu = reference_density(density, grid)?;
        let dens = mu.density().expect("grid measure");
        let rows: Vec<MeasureRow> = mu
            .points()
            .iter()
            .zip(mu.weights())
            .zip(&dens)
            .map(|((&x, &weight), &d)| MeasureRow { x, weight, density: d, reference: density.density(x) })
            .collect();
        let energy = log_energy(&mu);
        let chi = chi_one_var(&mu);
        let mut results = json!({ "energy": energy, "chi": chi, "theta": THETA });
        match density {
            ReferenceDensity::Semicircle { variance, .. } => {
                let exact = 0.5 * variance.ln() - 0.25 + THETA;
                results["chi_exact"] = json!(exact);
                if variance == 1.0 {
                    // The one-variable case of (n/2)(log 2 pi - 1), which
                    // differs from the energy formula; both are reported.
                    let alt = 0.5 * ((2.0 * std::f64::consts::PI).ln() - 1.0);
                    results["chi_alt"] = json!(alt);
                    results["chi_alt_gap"] = json!(chi - alt);
                    warnings.push(format!(
                        "chi via energy is {chi:.6}; the formula (n/2)(log 2 pi - 1) gives {alt:.6} (gap {:.6})",
                        chi - alt
                    ));
                }
            }
            ReferenceDensity::Arcsine { a, b } => {
                results["chi_exact"] = json!(((b - a) / 4.0).ln() + THETA);
            }
        }
        return Ok(Outcome { results, tables: vec![table("measure.csv", &rows)?], warnings });
    }
    let set = parse_intervals(&get(&cfg.intervals, "intervals")?)?;
    let eq = equilibrium_measure(&set, grid)?;
    if !eq.report.converged {
        warnings.push(format!("equilibrium solver stopped at duality gap {:e}", eq.report.gap));
    }
    let dens = eq.measure.density().expect("grid measure");
    let rows: Vec<MeasureRow> = eq
        .measure
        .points()
        .iter()
        .zip(eq.measure.weights())
        .zip(&dens)
        .zip(&eq.potential)
        .map(|(((&x, &weight), &density), &u)| MeasureRow { x, weight, density, reference: u })
        .collect();
    Ok(Outcome {
        results: json!({
            "robin": eq.robin,
            "capacity": eq.robin.exp(),
            "chi": chi_one_var(&eq.measure),
            "kappa": eq.robin + THETA,
            "potential_spread": eq.potential_spread(),
            "solver": { "iterations": eq.report.iterations, "gap": eq.report.gap, "converged": eq.report.converged },
        }),
        tables: vec![table("measure.csv", &rows)?],
        warnings,
    })
}

#[derive(Serialize)]
struct NormRow {
    k: usize,
    trial: u64,
    norm: f64,
}

#[derive(Serialize)]
struct NormSummary {
    k: usize,
    trials: u64,
    mean: f64,
    sd: f64,
    min: f64,
    max: f64,
    target: Option<f64>,
    abs_error: Option<f64>,
    rel_error: Option<f64>,
}

fn gue_norms(cfg: &ExperimentConfig, check: bool) -> Result<Outcome> {
    let n = get(&cfg.n, "n")?;
    let text = get(&cfg.poly, "poly")?;
    let poly = NCPolynomial::parse(&text, n)?;
    let dims = get(&cfg.dims, "dims")?;
    let trials = get(&cfg.trials, "trials")?;
    let seed = get(&cfg.seed, "seed")?;
    let mut warnings = Vec::new();
    let target = if check {
        let t = cfg.target.or_else(|| {
            poly.real_linear_coefficients().map(|c| 2.0 * c.iter().map(|x| x * x).sum::<f64>().sqrt())
        });
        if t.is_none() {
            warnings.push(format!("no limiting norm known for {text:?}; pass `target` to get errors"));
        }
        t
    } else {
        None
    };
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &k in &dims {
        let sampler = SamplerConfig::gaussian(k, n, seed_for(seed, k))?;
        let norms = sampler.par_map(trials, |_, t| poly.norm_at(&t)).into_iter().collect::<freecap::Result<Vec<_>>>()?;
        let m = norms.len() as f64;
        let mean = norms.iter().sum::<f64>() / m;
        let sd = if norms.len() > 1 {
            (norms.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
        } else {
            0.0
        };
        summary.push(NormSummary {
            k,
            trials,
            mean,
            sd,
            min: norms.iter().copied().fold(f64::INFINITY, f64::min),
            max: norms.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            target,
            abs_error: target.map(|t| (mean - t).abs()),
            rel_error: target.map(|t| (mean - t).abs() / t),
        });
        rows.extend(norms.into_iter().enumerate().map(|(i, norm)| NormRow { k, trial: i as u64, norm }));
    }
    let mut results = json!({ "poly": text, "n": n, "means": summary.iter().map(|s| json!({"k": s.k, "mean": s.mean, "sd": s.sd})).collect::<Vec<_>>() });
    let mut tables = vec![table("norms.csv", &rows)?];
    if check {
        let errors: Vec<Option<f64>> = summary.iter().map(|s| s.abs_error).collect();
        let monotone = target.map(|_| {
            let mut order: Vec<(usize, f64)> = summary.iter().map(|s| (s.k, s.abs_error.unwrap())).collect();
            order.sort_by_key(|&(k, _)| k);
            order.windows(2).all(|w| w[1].1 <= w[0].1)
        });
        if monotone == Some(false) {
            warnings.push(format!("absolute error is not monotone in k: {errors:?}"));
        }
        results["target"] = json!(target);
        results["abs_errors"] = json!(errors);
        results["monotone"] = json!(monotone);
        tables.push(table("summary.csv", &summary)?);
    }
    Ok(Outcome { results, tables, warnings })
}

/// The spec at `(k, eps)`, from the preset or the inlined spec.
fn spec_at(cfg: &ExperimentConfig, k: usize, eps: f64) -> freecap::Result<MicrostateSpec> {
    match (&cfg.preset, &cfg.spec) {
        (Some(p), _) => {
            freecap::presets::from_name(p, k, eps, cfg.degree.unwrap_or(freecap::presets::DEFAULT_CHEBYSHEV_DEGREE))
        }
        (None, Some(s)) => s.with_k(k)?.with_epsilon(eps),
        (None, None) => Err(freecap::Error::InvalidParameter("no preset or spec".into())),
    }
}

#[derive(Serialize)]
struct GammaRow {
    k: usize,
    epsilon: f64,
    probability: f64,
    std_error: f64,
    hits: u64,
    samples: u64,
}

fn gamma_measure(cfg: &ExperimentConfig) -> Result<Outcome> {
    let eps = get(&cfg.eps, "eps")?[0];
    let samples = get(&cfg.samples, "samples")?;
    let seed = get(&cfg.seed, "seed")?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for k in get(&cfg.k, "k")? {
        let spec = spec_at(cfg, k, eps)?;
        let g = estimate_gamma_measure(&spec, samples, seed_for(seed, k))?;
        if g.hits == 0 {
            warnings.push(format!("k={k}: zero_hits (no sample was a microstate)"));
        }
        rows.push(GammaRow { k, epsilon: eps, probability: g.probability, std_error: g.std_error, hits: g.hits, samples });
    }
    let results = json!({ "estimates": rows.iter().map(|r| json!({"k": r.k, "probability": r.probability, "std_error": r.std_error})).collect::<Vec<_>>() });
    Ok(Outcome { results, tables: vec![table("gamma.csv", &rows)?], warnings })
}

pub fn flag_name(f: EstimateFlag) -> String {
    serde_json::to_value(f).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn estimator_name(e: &VolumeEstimate) -> String {
    serde_json::to_value(e.estimator).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

#[derive(Serialize)]
struct VolumeRow {
    k: usize,
    epsilon: f64,
    estimator: String,
    raw_log_vol: f64,
    normalized: f64,
    std_error: f64,
    normalized_std_error: f64,
    hits: u64,
    samples: u64,
    radius: Option<f64>,
    flags: String,
}

fn volume(cfg: &ExperimentConfig) -> Result<Outcome> {
    let eps = get(&cfg.eps, "eps")?[0];
    let samples = get(&cfg.samples, "samples")?;
    let seed = get(&cfg.seed, "seed")?;
    let which = get(&cfg.estimator, "estimator")?;
    let mut rows = Vec::new();
    let mut estimates = Vec::new();
    let mut warnings = Vec::new();
    for k in get(&cfg.k, "k")? {
        let spec = spec_at(cfg, k, eps)?;
        let s = seed_for(seed, k);
        let mut found = Vec::new();
        if which != EstimatorChoice::Gaussian {
            let radius = cfg.radius.or(spec.containing_radius()).unwrap_or(spec.radius_bound());
            found.push((Some(radius), estimate_volume_ball(&spec, radius, samples, s)?));
        }
        if which != EstimatorChoice::Ball {
            found.push((None, estimate_volume_gaussian(&spec, samples, s)?));
        }
        for (radius, e) in found {
            let flags: Vec<String> = e.flags.iter().map(|&f| flag_name(f)).collect();
            for f in &flags {
                warnings.push(format!("k={k} {}: {f}", estimator_name(&e)));
            }
            rows.push(VolumeRow {
                k,
                epsilon: eps,
                estimator: estimator_name(&e),
                raw_log_vol: e.raw_log_vol,
                normalized: e.normalized,
                std_error: e.std_error,
                normalized_std_error: e.normalized_std_error(),
                hits: e.hits,
                samples: e.samples_used,
                radius,
                flags: flags.join(";"),
            });
            estimates.push(e);
        }
    }
    Ok(Outcome {
        results: json!({ "theta": THETA, "estimates": estimates }),
        tables: vec![table("volume.csv", &rows)?],
        warnings,
    })
}

#[derive(Serialize)]
struct CoveringRow {
    k: usize,
    epsilon: f64,
    net_size: usize,
    normalized: f64,
    saturated: bool,
}

#[derive(Serialize)]
struct CoveringFit {
    k: usize,
    slope: f64,
    intercept: f64,
    exponent_ratio: f64,
    c1: f64,
    c2: f64,
}

fn covering(cfg: &ExperimentConfig) -> Result<Outcome> {
    let radius = get(&cfg.radius, "radius")?;
    let eps = get(&cfg.eps, "eps")?;
    let samples = get(&cfg.samples, "samples")?;
    let seed = get(&cfg.seed, "seed")?;
    let metric: Metric = get(&cfg.metric, "metric")?.into();
    let (mut rows, mut fits, mut warnings) = (Vec::new(), Vec::new(), Vec::new());
    for k in get(&cfg.k, "k")? {
        let r = ball_covering_bounds_check(k, radius, &eps, samples, seed_for(seed, k), metric)?;
        for (c, &sat) in r.cells.iter().zip(&r.saturated) {
            if sat {
                warnings.push(format!(
                    "k={k} eps={}: net of {} centers is saturated and left out of the fit",
                    c.epsilon, c.net_size
                ));
            }
            rows.push(CoveringRow { k, epsilon: c.epsilon, net_size: c.net_size, normalized: c.normalized, saturated: sat });
        }
        if r.slope.is_nan() {
            warnings.push(format!("k={k}: fewer than two unsaturated cells, no exponent fitted"));
        }
        fits.push(CoveringFit { k, slope: r.slope, intercept: r.intercept, exponent_ratio: r.exponent_ratio, c1: r.c1, c2: r.c2 });
    }
    let results = json!({ "fits": fits.iter().map(|f| json!({"k": f.k, "slope": f.slope, "exponent_ratio": f.exponent_ratio, "c1": f.c1, "c2": f.c2})).collect::<Vec<_>>() });
    Ok(Outcome { results, tables: vec![table("nets.csv", &rows)?, table("fit.csv", &fits)?], warnings })
}

#[derive(Serialize)]
struct CellRow {
    k: usize,
    epsilon: f64,
    seed: u64,
    accepted: usize,
    net_size: Option<usize>,
    normalized: Option<f64>,
    flagged: bool,
}

#[derive(Serialize)]
struct DimensionRow {
    epsilon: f64,
    abs_log_eps: f64,
    d_eps: Option<f64>,
    residual: Option<f64>,
}

fn dimension(cfg: &ExperimentConfig) -> Result<Outcome> {
    let eps = get(&cfg.eps, "eps")?;
    let k_grid = get(&cfg.k, "k")?;
    let samples = get(&cfg.samples, "samples")?;
    let seed = get(&cfg.seed, "seed")?;
    let metric: Metric = get(&cfg.metric, "metric")?.into();
    let r = delta_top_estimate(|k, e| spec_at(cfg, k, e), &k_grid, &eps, samples, seed, metric)?;
    let mut warnings: Vec<String> = r
        .cells
        .iter()
        .filter(|c| c.flagged)
        .map(|c| match c.net_size {
            None => format!(
                "k={} eps={}: only {} accepted samples (< {}), cell skipped",
                c.k,
                c.epsilon,
                c.accepted,
                entropy::MIN_ACCEPTED
            ),
            Some(m) => format!("k={} eps={}: net of {m} centers is saturated, cell skipped", c.k, c.epsilon),
        })
        .collect();
    if r.slope.is_nan() {
        warnings.push("fewer than two scales with a usable cell, no slope fitted".into());
    }
    let cells: Vec<CellRow> = r
        .cells
        .iter()
        .map(|c| CellRow {
            k: c.k,
            epsilon: c.epsilon,
            seed: c.seed,
            accepted: c.accepted,
            net_size: c.net_size,
            normalized: c.normalized,
            flagged: c.flagged,
        })
        .collect();
    let dims: Vec<DimensionRow> = eps
        .iter()
        .zip(&r.d_eps)
        .zip(&r.residuals)
        .map(|((&e, &d), &res)| DimensionRow { epsilon: e, abs_log_eps: e.ln().abs(), d_eps: d, residual: res })
        .collect();
    Ok(Outcome {
        results: json!({ "slope": r.slope, "intercept": r.intercept, "d_eps": r.d_eps, "proxy": r.proxy }),
        tables: vec![table("cells.csv", &cells)?, table("dimension.csv", &dims)?],
        warnings,
    })
}

#[derive(Serialize)]
struct PinningRow {
    k: usize,
    delta: f64,
    fraction: Option<f64>,
    accepted: u64,
    samples: u64,
}

#[derive(Serialize)]
struct PinningValue {
    k: usize,
    index: usize,
    trace_square: f64,
}

fn trace_pinning(cfg: &ExperimentConfig) -> Result<Outcome> {
    let eps = get(&cfg.eps, "eps")?[0];
    let samples = get(&cfg.samples, "samples")?;
    let seed = get(&cfg.seed, "seed")?;
    let (mut rows, mut values, mut warnings, mut reports) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for k in get(&cfg.k, "k")? {
        let r = entropy::trace_pinning_check(k, eps, samples, seed_for(seed, k))?;
        if r.accepted == 0 {
            warnings.push(format!("k={k}: zero_hits (no sample was a microstate)"));
        }
        for &(delta, fraction) in &r.fractions {
            rows.push(PinningRow { k, delta, fraction, accepted: r.accepted, samples });
        }
        values.extend(r.values.iter().enumerate().map(|(index, &v)| PinningValue { k, index, trace_square: v }));
        reports.push(json!({ "k": k, "accepted": r.accepted, "fractions": r.fractions }));
    }
    Ok(Outcome {
        results: json!({ "reports": reports }),
        tables: vec![table("pinning.csv", &rows)?, table("values.csv", &values)?],
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_syntax() {
        let k = parse_intervals(" [0, 1], [2,3] ").unwrap();
        assert_eq!(k.intervals(), &[(0.0, 1.0), (2.0, 3.0)]);
        assert_eq!(parse_intervals("[-1,1]").unwrap().intervals(), &[(-1.0, 1.0)]);
        for bad in ["", "[1]", "(0,1)", "[a,b]", "[0,1][2"] {
            assert!(parse_intervals(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn reference_syntax() {
        assert_eq!(
            parse_reference("semicircle:0,1").unwrap(),
            ReferenceDensity::Semicircle { center: 0.0, variance: 1.0 }
        );
        assert_eq!(parse_reference("arcsine:-1,1").unwrap(), ReferenceDensity::Arcsine { a: -1.0, b: 1.0 });
        assert!(parse_reference("gauss:0,1").is_err());
    }

    #[test]
    fn csv_rows() {
        let t = table("x.csv", &[DimensionRow { epsilon: 0.5, abs_log_eps: 0.5f64.ln().abs(), d_eps: None, residual: None }])
            .unwrap();
        let text = String::from_utf8(t.bytes).unwrap();
        assert!(text.starts_with("epsilon,abs_log_eps,d_eps,residual\n0.5,"));
        assert_eq!(t.rows, 1);
    }
}
