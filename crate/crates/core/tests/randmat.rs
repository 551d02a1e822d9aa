use freecap::linalg::{CMatrix, HermitianMatrix, MatrixTuple};
use freecap::randmat::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (m, x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0))
}

#[test]
fn scalar_gaussian_is_standard_normal() {
    let cfg = SamplerConfig::gaussian(1, 1, 1).unwrap();
    let x: Vec<f64> = sample_gue(&cfg, 100_000).unwrap().map(|t| t.component(0).get(0, 0).re).collect();
    let (m, v) = mean_var(&x);
    assert!((0.97..=1.03).contains(&v), "variance {v}");
    assert!(m.abs() < 0.01);
}

#[test]
fn gue_trace_of_square() {
    let cfg = SamplerConfig::gaussian(10, 1, 2).unwrap();
    let x = cfg.par_map(10_000, |_, t| t.component(0).trace_square() / 10.0);
    let (m, _) = mean_var(&x);
    assert!((m - 1.0).abs() < 0.02, "mean {m}");
}

#[test]
fn large_gue_norm_near_two() {
    let cfg = SamplerConfig::gaussian(500, 1, 3).unwrap();
    let norm = cfg.sample(0).component(0).opnorm();
    assert!((norm - 2.0).abs() < 0.1, "norm {norm}");
}

fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn gue_is_unitarily_invariant() {
    let k = 8;
    let cfg = SamplerConfig::gaussian(k, 1, 4).unwrap();
    let u = haar_unitary(k, &mut ChaCha8Rng::seed_from_u64(99));
    let n = 3000;
    let plain: Vec<HermitianMatrix> = cfg.samples(0, n).map(|t| t.component(0).clone()).collect();
    let turned: Vec<HermitianMatrix> = cfg.samples(n, n).map(|t| t.component(0).conjugate_by(&u)).collect();
    // 1% critical value of the two-sample KS statistic.
    let crit = 1.63 * (2.0 / n as f64).sqrt();
    let stat = |f: &dyn Fn(&HermitianMatrix) -> f64| {
        ks_statistic(plain.iter().map(f).collect(), turned.iter().map(f).collect())
    };
    assert!(stat(&|m| m.trace_square() / k as f64) < crit);
    assert!(stat(&|m| m.get(0, 0).re) < crit);
    assert!(stat(&|m| m.get(0, 1).im) < crit);
}

#[test]
fn haar_unitary_is_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = haar_unitary(7, &mut rng);
    let uu = u.adjoint().matmul(&u);
    assert!((&uu - &CMatrix::identity(7)).max_abs() < 1e-12);
}

#[test]
fn scalar_ball_is_uniform() {
    let r = 1.5;
    let cfg = SamplerConfig::uniform_ball(1, 2, r, 6).unwrap();
    let n = 50_000;
    let x: Vec<f64> = sample_ball(&cfg, n).unwrap().flat_map(|t| [t.component(0).get(0, 0).re, t.component(1).get(0, 0).re]).collect();
    let (m, v) = mean_var(&x);
    let sd = r / 3f64.sqrt();
    assert!(m.abs() < 3.0 * sd / (x.len() as f64).sqrt());
    assert!((v - sd * sd).abs() < 0.02 * sd * sd);
}

#[test]
fn ball_samples_respect_the_radius() {
    for k in [1, 2, 3, 5, 8] {
        let cfg = SamplerConfig::uniform_ball(k, 2, 0.7, 7).unwrap();
        assert!(cfg.par_map(500, |_, t| t.max_opnorm()).iter().all(|&x| x <= 0.7));
    }
    assert!(matches!(SamplerConfig::uniform_ball(13, 1, 1.0, 0), Err(freecap::Error::Unsupported(_))));
}

/// 2x2 Hermitian `[[a, x + iy], [x - iy, d]]` from four Gaussian coordinates.
struct TwoByTwo {
    a: f64,
    d: f64,
    x: f64,
    y: f64,
}

impl TwoByTwo {
    fn draw(rng: &mut ChaCha8Rng, sd: f64) -> Self {
        let mut g = || sd * rng.sample::<f64, _>(StandardNormal);
        TwoByTwo { a: g(), d: g(), x: g(), y: g() }
    }
    fn opnorm(&self) -> f64 {
        let u = 0.5 * (self.a + self.d);
        let v = 0.5 * (self.a - self.d);
        u.abs() + (v * v + self.x * self.x + self.y * self.y).sqrt()
    }
    fn coord_sq(&self) -> f64 {
        self.a * self.a + self.d * self.d + self.x * self.x + self.y * self.y
    }
    fn trace_square(&self) -> f64 {
        self.a * self.a + self.d * self.d + 2.0 * (self.x * self.x + self.y * self.y)
    }
}

#[test]
fn two_by_two_ball_matches_rejection_oracle() {
    // Uniform on B(2,1) from a Gaussian proposal: inside the ball the
    // coordinate square is at most Tr A^2 <= 2, so accepting with
    // probability exp((q - 2) / (2 sd^2)) flattens the proposal density.
    let sd = 0.6;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut acc = Vec::new();
    while acc.len() < 40_000 {
        let m = TwoByTwo::draw(&mut rng, sd);
        if m.opnorm() <= 1.0 && rng.random::<f64>() < ((m.coord_sq() - 2.0) / (2.0 * sd * sd)).exp() {
            acc.push(m.trace_square() / 2.0);
        }
    }
    let oracle = mean_var(&acc).0;
    let cfg = SamplerConfig::uniform_ball(2, 1, 1.0, 9).unwrap();
    let ours = mean_var(&cfg.par_map(40_000, |_, t| t.component(0).trace_square() / 2.0)).0;
    assert!((ours - oracle).abs() < 0.02 * oracle, "{ours} vs {oracle}");
}

/// Importance estimate of `vol B(k, 1)` in Hilbert-Schmidt coordinates
/// (`sqrt 2` times real and imaginary parts off the diagonal), with a
/// Gaussian proposal. Returns `(log vol, standard error of log vol)`.
fn ball_volume_oracle(k: usize, samples: usize, seed: u64) -> (f64, f64) {
    let sd = 0.55;
    let dims = k * k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_norm = 0.5 * dims as f64 * (2.0 * std::f64::consts::PI * sd * sd).ln();
    let mut w = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut m = CMatrix::zeros(k);
        let mut q = 0.0;
        for i in 0..k {
            let g: f64 = sd * rng.sample::<f64, _>(StandardNormal);
            q += g * g;
            m.set(i, i, Complex64::new(g, 0.0));
            for j in (i + 1)..k {
                let (re, im): (f64, f64) = (sd * rng.sample::<f64, _>(StandardNormal), sd * rng.sample::<f64, _>(StandardNormal));
                q += re * re + im * im;
                // Orthonormal HS coordinates are sqrt(2) re and sqrt(2) im.
                let z = Complex64::new(re, im) / 2f64.sqrt();
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        let inside = HermitianMatrix::new(m).unwrap().opnorm() <= 1.0;
        w.push(if inside { (q / (2.0 * sd * sd) + log_norm).exp() } else { 0.0 });
    }
    let (m, v) = mean_var(&w);
    (m.ln(), (v / samples as f64).sqrt() / m)
}

#[test]
fn ball_volume_against_monte_carlo() {
    let (v2, se2) = ball_volume_oracle(2, 10_000_000, 10);
    let exact2 = log_ball_volume(2, 1, 1.0);
    assert!((exact2.exp() - v2.exp()).abs() < 0.01 * exact2.exp(), "{exact2} vs {v2}");
    assert!((exact2 - (8.0 * std::f64::consts::PI / 3.0).ln()).abs() < 1e-12);
    assert!((exact2 - v2).abs() < 3.0 * se2);
    let (v3, se3) = ball_volume_oracle(3, 2_000_000, 11);
    assert!((log_ball_volume(3, 1, 1.0) - v3).abs() < 3.0 * se3, "{} vs {v3} +- {se3}", log_ball_volume(3, 1, 1.0));
    assert!((log_ball_volume(1, 1, 2.0) - 4f64.ln()).abs() < 1e-14);
}

#[test]
fn samples_do_not_depend_on_thread_count() {
    let cfg = SamplerConfig::uniform_ball(3, 2, 1.0, 12).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| cfg.par_map(200, |_, t: MatrixTuple| t))
    };
    assert_eq!(run(1), run(4));
    let g = SamplerConfig::gaussian(4, 3, 12).unwrap();
    assert_eq!(g.sample(17), g.sample(17));
    assert_ne!(g.sample(17), g.sample(18));
}
