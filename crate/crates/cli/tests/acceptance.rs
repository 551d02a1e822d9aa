//! Desk-scale acceptance run: one PASS/FAIL line per criterion, exit status
//! 1 if any criterion fails. Tolerances and sample sizes are pinned below.

use std::path::Path;
use std::time::Instant;

use freecap::entropy::{
    ball_covering_bounds_check, delta_top_estimate, estimate_gamma_measure, estimate_volume_ball,
    estimate_volume_gaussian, Metric,
};
use freecap::linalg::{CMatrix, HermitianMatrix, MatrixTuple};
use freecap::microstates::{direct_sum, Constraint, MicrostateSpec};
use freecap::ncpoly::NCPolynomial;
use freecap::potential::{
    capacity, chi_one_var, equilibrium_measure, kappa_one_var, reference_density, RealCompact, ReferenceDensity,
    THETA,
};
use freecap::randmat::{haar_unitary, SamplerConfig};
use freecap::rng::derive_seed;
use freecap::presets;
use freecap_cli::{execute, manifest::replay, ExperimentConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LN2: f64 = std::f64::consts::LN_2;

// 1
const CAP_GRID: usize = 2000;
const CAP_TOL: f64 = 1e-3;
const KAPPA_TOL: f64 = 2e-3;
const CAP_SECONDS: f64 = 60.0;
// 2
const ARCSINE_L1_TOL: f64 = 5e-2;
const ARCSINE_WINDOW: f64 = 0.95;
const SPREAD_TOL: f64 = 5e-3;
// 3
const CHI_GRID: usize = 4000;
const CHI_TOL: f64 = 2e-3;
// 4
const HT_DIMS: [usize; 4] = [50, 100, 200, 400];
const HT_TRIALS: u64 = 20;
const HT_REL_TOL: f64 = 0.05;
const HT_SECONDS: f64 = 600.0;
// 5
const GAMMA_K: usize = 200;
const GAMMA_EPS: f64 = 0.5;
const GAMMA_SAMPLES: u64 = 200;
const GAMMA_MIN: f64 = 0.95;
// 6
const SHELL_SAMPLES: u64 = 100_000;
const SIGMAS: f64 = 3.0;
const RANDOM_SPECS: usize = 10;
// 7
const TREND_EPS: f64 = 0.1;
const TREND_SAMPLES: u64 = 50_000;
const TREND_GAP: f64 = 0.5;
// 8
const INSTANCES: usize = 100;
const BLOCK_TOL: f64 = 1e-10;
// 9
const COVER_K1_EPS: [f64; 4] = [0.5, 0.2, 0.1, 0.05];
const COVER_K1_SAMPLES: u64 = 4000;
const COVER_K2_EPS: [f64; 4] = [0.5, 0.4, 0.3, 0.25];
const COVER_K2_SAMPLES: u64 = 20_000;
const COVER_FACTOR: f64 = 2.0;
const EXPONENT_REL: f64 = 0.3;
// 10
const DIM_EPS: [f64; 3] = [0.4, 0.2, 0.1];
const DIM_K: [usize; 3] = [1, 2, 3];
const DIM_SAMPLES: u64 = 3000;
const DIM_TOL: f64 = 0.3;

const SEED: u64 = 20_240_601;

type Outcome = Result<(bool, String), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn interval(a: f64, b: f64) -> RealCompact {
    RealCompact::interval(a, b).unwrap()
}

fn c1_capacity() -> Outcome {
    let start = Instant::now();
    let cap = capacity(&interval(-1.0, 1.0), CAP_GRID).map_err(err)?;
    let kappa = kappa_one_var(&interval(-1.0, 1.0), CAP_GRID).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let ok = (cap - 0.5).abs() <= CAP_TOL && (kappa - (THETA - LN2)).abs() <= KAPPA_TOL && secs <= CAP_SECONDS;
    Ok((
        ok,
        format!(
            "cap = {cap:.6} (0.5 +- {CAP_TOL:e}), kappa = {kappa:.6} ({:.6} +- {KAPPA_TOL:e}), {secs:.1} s (<= {CAP_SECONDS} s)",
            THETA - LN2
        ),
    ))
}

fn c2_arcsine() -> Outcome {
    let eq = equilibrium_measure(&interval(-1.0, 1.0), CAP_GRID).map_err(err)?;
    let arc = ReferenceDensity::Arcsine { a: -1.0, b: 1.0 };
    let h = eq.measure.widths().ok_or("equilibrium measure has no cell widths")?;
    let l1: f64 = eq
        .measure
        .points()
        .iter()
        .zip(eq.measure.weights())
        .zip(h)
        .filter(|((x, _), _)| x.abs() <= ARCSINE_WINDOW)
        .map(|((x, w), h)| (w / h - arc.density(*x)).abs() * h)
        .sum();
    let spread = eq.potential_spread();
    Ok((
        l1 <= ARCSINE_L1_TOL && spread <= SPREAD_TOL,
        format!("weighted L1 on [-{ARCSINE_WINDOW},{ARCSINE_WINDOW}] = {l1:.2e} (<= {ARCSINE_L1_TOL:e}), potential spread = {spread:.2e} (<= {SPREAD_TOL:e})"),
    ))
}

fn c3_semicircle_chi() -> Outcome {
    let mu = reference_density(ReferenceDensity::Semicircle { center: 0.0, variance: 1.0 }, CHI_GRID).map_err(err)?;
    let chi = chi_one_var(&mu);
    let exact = 0.5 + 0.5 * (2.0 * std::f64::consts::PI).ln();
    let alt = 0.5 * ((2.0 * std::f64::consts::PI).ln() - 1.0);
    Ok((
        (chi - exact).abs() <= CHI_TOL,
        format!(
            "chi = {chi:.6} (1/2 + 1/2 log 2pi = {exact:.6} +- {CHI_TOL:e}); (n/2)(log 2pi - 1) = {alt:.6}, gap = {:.6}",
            chi - alt
        ),
    ))
}

/// Mean norms of `poly` over `HT_DIMS`.
fn gue_means(poly: &NCPolynomial, n: usize, seed: u64) -> Result<Vec<f64>, String> {
    HT_DIMS
        .iter()
        .map(|&k| {
            let cfg = SamplerConfig::gaussian(k, n, derive_seed(seed, &[k as u64])).map_err(err)?;
            let norms = cfg.par_map(HT_TRIALS, |_, t| poly.norm_at(&t)).into_iter().collect::<Result<Vec<_>, _>>().map_err(err)?;
            Ok(norms.iter().sum::<f64>() / norms.len() as f64)
        })
        .collect()
}

fn c4_haagerup_thorbjornsen() -> Outcome {
    let start = Instant::now();
    let x1 = NCPolynomial::parse("X1", 1).map_err(err)?;
    let sum = NCPolynomial::parse("X1+X2", 2).map_err(err)?;
    let m1 = gue_means(&x1, 1, SEED)?;
    let m2 = gue_means(&sum, 2, SEED + 1)?;
    let secs = start.elapsed().as_secs_f64();
    let err1: Vec<f64> = m1.iter().map(|m| (m - 2.0).abs()).collect();
    let target2 = 2.0 * 2f64.sqrt();
    let err2: Vec<f64> = m2.iter().map(|m| (m - target2).abs()).collect();
    let monotone1 = err1.windows(2).all(|w| w[1] <= w[0]);
    let monotone2 = err2.windows(2).all(|w| w[1] <= w[0]);
    let last1 = err1[err1.len() - 1] / 2.0;
    let last2 = err2[err2.len() - 1] / target2;
    let ok = last1 <= HT_REL_TOL && last2 <= HT_REL_TOL && monotone1 && secs <= HT_SECONDS;
    Ok((
        ok,
        format!(
            "X1 means {m1:.4?} rel err at k=400 {last1:.4} (<= {HT_REL_TOL}), monotone {monotone1}; X1+X2 means {m2:.4?} rel err {last2:.4}, monotone {monotone2}; {secs:.1} s"
        ),
    ))
}

fn c5_gamma() -> Outcome {
    let spec = presets::semicircular(1, GAMMA_K, GAMMA_EPS, &[]).map_err(err)?;
    let g = estimate_gamma_measure(&spec, GAMMA_SAMPLES, SEED).map_err(err)?;
    Ok((
        g.probability >= GAMMA_MIN,
        format!("gamma_{GAMMA_K}(Gamma) = {:.3} +- {:.3} ({} / {GAMMA_SAMPLES}; >= {GAMMA_MIN})", g.probability, g.std_error, g.hits),
    ))
}

fn random_shell(rng: &mut ChaCha8Rng) -> Result<(MicrostateSpec, f64), String> {
    let k = rng.random_range(1..=3);
    let t = rng.random_range(0.6..1.2);
    let eps = rng.random_range(0.15..0.4);
    let mut extra = Vec::new();
    if rng.random_bool(0.5) {
        let sq = NCPolynomial::parse("X1*X1", 1).map_err(err)?;
        extra.push(Constraint::new(sq, t * t).map_err(err)?);
    }
    Ok((MicrostateSpec::standard(1, 0, k, eps, &[t], extra).map_err(err)?, t + eps + 0.1))
}

fn c6_small_volume() -> Outcome {
    let shell = MicrostateSpec::standard(1, 0, 1, 0.1, &[1.0], vec![]).map_err(err)?;
    let exact = 0.4f64.ln();
    let a = estimate_volume_ball(&shell, 1.5, SHELL_SAMPLES, SEED).map_err(err)?;
    let b = estimate_volume_gaussian(&shell, SHELL_SAMPLES, SEED).map_err(err)?;
    let za = (a.raw_log_vol - exact).abs() / a.std_error;
    let zb = (b.raw_log_vol - exact).abs() / b.std_error;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for i in 0..RANDOM_SPECS {
        let (spec, radius) = random_shell(&mut rng)?;
        let x = estimate_volume_ball(&spec, radius, SHELL_SAMPLES, derive_seed(SEED, &[i as u64, 1])).map_err(err)?;
        let y = estimate_volume_gaussian(&spec, SHELL_SAMPLES, derive_seed(SEED, &[i as u64, 2])).map_err(err)?;
        let z = (x.raw_log_vol - y.raw_log_vol).abs() / (x.std_error.powi(2) + y.std_error.powi(2)).sqrt();
        worst = worst.max(z);
    }
    Ok((
        za <= SIGMAS && zb <= SIGMAS && worst <= SIGMAS,
        format!(
            "log 0.4 = {exact:.4}: ball {:.4} ({za:.2} se), gaussian {:.4} ({zb:.2} se); worst disagreement on {RANDOM_SPECS} specs {worst:.2} sigma (<= {SIGMAS})",
            a.raw_log_vol, b.raw_log_vol
        ),
    ))
}

fn c7_chi_below_kappa() -> Outcome {
    let kappa = kappa_one_var(&interval(-2.0, 2.0), CAP_GRID).map_err(err)?;
    let mut values = Vec::new();
    let mut ok = true;
    let mut prev: Option<(f64, f64)> = None;
    for k in 2..=6 {
        let spec = presets::interval(-2.0, 2.0, k, TREND_EPS, presets::DEFAULT_CHEBYSHEV_DEGREE).map_err(err)?;
        let radius = spec.containing_radius().ok_or("interval preset is bounded")?;
        let e = estimate_volume_ball(&spec, radius, TREND_SAMPLES, derive_seed(SEED, &[k as u64])).map_err(err)?;
        let (v, se) = (e.normalized, e.normalized_std_error());
        ok &= v <= THETA + SIGMAS * se;
        if let Some((pv, pse)) = prev {
            ok &= v >= pv - SIGMAS * (se * se + pse * pse).sqrt();
        }
        prev = Some((v, se));
        values.push(v);
    }
    let last = values[values.len() - 1];
    ok &= (kappa - last).abs() <= TREND_GAP;
    Ok((
        ok,
        format!(
            "eps = {TREND_EPS}: normalized k=2..6 {values:.4?}, kappa = {kappa:.4} (theta = {THETA:.4}), gap at k=6 {:.4} (<= {TREND_GAP})",
            kappa - last
        ),
    ))
}

fn random_hermitian(k: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let mut m = CMatrix::zeros(k);
    for i in 0..k {
        m.set(i, i, Complex64::new(rng.random_range(-1.0..1.0), 0.0));
        for j in (i + 1)..k {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    HermitianMatrix::new(m).expect("constructed Hermitian")
}

fn random_tuple(n: usize, k: usize, rng: &mut ChaCha8Rng) -> MatrixTuple {
    MatrixTuple::new((0..n).map(|_| random_hermitian(k, rng)).collect()).expect("shared dimension")
}

fn random_poly(arity: usize, rng: &mut ChaCha8Rng) -> NCPolynomial {
    let items: Vec<(Vec<usize>, Complex64)> = (0..3)
        .map(|_| {
            let len = rng.random_range(0..=3);
            let w = (0..len).map(|_| rng.random_range(0..arity)).collect();
            (w, Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
        })
        .collect();
    NCPolynomial::from_terms(arity, items).expect("valid terms")
}

fn c8_direct_sums() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut membership_failures, mut worst_block) = (0usize, 0.0f64);
    for _ in 0..INSTANCES {
        let (n, m) = (rng.random_range(1..=2), rng.random_range(0..=1));
        let polys: Vec<NCPolynomial> = (0..3).map(|_| random_poly(n + m, &mut rng)).collect();
        let eps = rng.random_range(0.01..0.3);
        let t1 = random_tuple(n + m, rng.random_range(1..=4), &mut rng);
        let constraints =
            polys.iter().map(|p| Constraint::new(p.clone(), p.norm_at(&t1)?)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        let spec = MicrostateSpec::new(n, m, t1.dim(), eps, 10.0, constraints).map_err(err)?;
        let mut t2 = random_tuple(n + m, rng.random_range(1..=4), &mut rng);
        let spec2 = spec.with_k(t2.dim()).map_err(err)?;
        for _ in 0..40 {
            if spec2.is_semi_microstate(&t2).map_err(err)? {
                break;
            }
            t2 = MatrixTuple::new(t2.components().iter().map(|c| c.scale(0.5)).collect()).map_err(err)?;
        }
        if !spec2.is_semi_microstate(&t2).map_err(err)? {
            // Constant terms can keep a shrunk tuple out; a unitary conjugate
            // of t1 is always a semi-microstate.
            let u = haar_unitary(t1.dim(), &mut rng);
            t2 = MatrixTuple::new(t1.components().iter().map(|c| c.conjugate_by(&u)).collect()).map_err(err)?;
        }
        let sum = direct_sum(&t1, &t2).map_err(err)?;
        if !spec.with_k(sum.dim()).map_err(err)?.is_microstate(&sum).map_err(err)? {
            membership_failures += 1;
        }
        for p in &polys {
            let lhs = p.norm_at(&sum).map_err(err)?;
            let rhs = p.norm_at(&t1).map_err(err)?.max(p.norm_at(&t2).map_err(err)?);
            worst_block = worst_block.max((lhs - rhs).abs() / (1.0 + rhs));
        }
    }
    Ok((
        membership_failures == 0 && worst_block <= BLOCK_TOL,
        format!(
            "{INSTANCES} instances: membership failures {membership_failures}, worst block-identity error {worst_block:.1e} (<= {BLOCK_TOL:e})"
        ),
    ))
}

fn c9_covering() -> Outcome {
    let k1 = ball_covering_bounds_check(1, 1.0, &COVER_K1_EPS, COVER_K1_SAMPLES, SEED, Metric::Uniform).map_err(err)?;
    let sizes: Vec<usize> = k1.cells.iter().map(|c| c.net_size).collect();
    let within = k1.cells.iter().all(|c| {
        let n = (1.0 / c.epsilon).ceil();
        let s = c.net_size as f64;
        s <= COVER_FACTOR * n && s >= n / COVER_FACTOR
    });
    let k2 = ball_covering_bounds_check(2, 1.0, &COVER_K2_EPS, COVER_K2_SAMPLES, SEED, Metric::Uniform).map_err(err)?;
    let ok = within && k1.exponent_within(EXPONENT_REL) && k2.exponent_within(EXPONENT_REL);
    Ok((
        ok,
        format!(
            "k=1 sizes {sizes:?} vs ceil(1/eps) within x{COVER_FACTOR}: {within}; exponent/k^2: k=1 {:.3}, k=2 {:.3} (within {EXPONENT_REL})",
            k1.exponent_ratio, k2.exponent_ratio
        ),
    ))
}

fn c10_dimension() -> Outcome {
    let r = delta_top_estimate(|k, e| presets::ball(1, k, e, 1.0), &DIM_K, &DIM_EPS, DIM_SAMPLES, SEED, Metric::Uniform)
        .map_err(err)?;
    let flagged = r.cells.iter().filter(|c| c.flagged).count();
    Ok((
        (r.slope - 1.0).abs() <= DIM_TOL,
        format!("slope = {:.3} (1 +- {DIM_TOL}); D_eps {:.3?}; {flagged} flagged cells", r.slope, r.d_eps),
    ))
}

fn data_bytes(run_dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(run_dir.join("data"))
        .expect("data directory")
        .map(|e| {
            let p = e.expect("entry").path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).expect("readable"))
        })
        .collect();
    v.sort();
    v
}

fn c11_reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().map_err(err)?;
    let configs = [
        r#"{"command": "volume", "preset": "interval:-2,2", "k": [1, 2], "eps": [0.1], "samples": 20000, "seed": 1}"#,
        r#"{"command": "dimension", "preset": "ball", "k": [1, 2], "eps": [0.4, 0.2, 0.1], "samples": 1000, "seed": 2}"#,
        r#"{"command": "ht-check", "n": 2, "poly": "X1+X2", "dims": [20, 40], "trials": 8, "seed": 3}"#,
        r#"{"command": "trace-pinning", "k": [30], "eps": [0.5], "samples": 300, "seed": 4}"#,
    ];
    let mut identical = 0;
    for text in configs {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(err)?;
        let (d1, m1) = execute(&cfg, tmp.path(), Some(1)).map_err(err)?;
        let (d4, _) = execute(&cfg, tmp.path(), Some(4)).map_err(err)?;
        let (dr, mr) = replay(&d1.join("manifest.json"), tmp.path(), None).map_err(err)?;
        let base = data_bytes(&d1);
        let same = data_bytes(&d4) == base && data_bytes(&dr) == base && mr.outputs == m1.outputs;
        identical += same as usize;
    }
    Ok((
        identical == configs.len(),
        format!("{identical}/{} experiments byte-identical across workers 1, 4, default and manifest replay", configs.len()),
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("capacity dictionary", c1_capacity),
        ("arcsine equilibrium", c2_arcsine),
        ("semicircle chi via energy", c3_semicircle_chi),
        ("GUE norm convergence", c4_haagerup_thorbjornsen),
        ("Gaussian measure of microstates", c5_gamma),
        ("exact small-case volume", c6_small_volume),
        ("chi_top <= kappa trend", c7_chi_below_kappa),
        ("direct-sum inclusions", c8_direct_sums),
        ("covering bounds", c9_covering),
        ("delta_top trend", c10_dimension),
        ("reproducibility", c11_reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += !ok as usize;
        println!(
            "{} {:>2} {name}: {detail} [{:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
