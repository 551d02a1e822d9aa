use freecap::potential::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LN2: f64 = std::f64::consts::LN_2;

fn interval(a: f64, b: f64) -> RealCompact {
    RealCompact::interval(a, b).unwrap()
}

#[test]
fn arcsine_energy_by_quadrature() {
    // The arcsine law has constant potential -log 2 on [-1,1], so its energy is -log 2.
    let arc = reference_density(ReferenceDensity::Arcsine { a: -1.0, b: 1.0 }, 4000).unwrap();
    assert!((log_energy(&arc) + LN2).abs() < 1e-3);
    assert!((chi_one_var(&arc) - (THETA - LN2)).abs() < 1e-3);
    assert!((chi_one_var(&arc) - 0.97579).abs() < 1e-3);
}

#[test]
fn semicircle_entropy_by_quadrature() {
    // Potential x^2/4 - 1/2 on [-2,2] integrates to energy -1/4.
    let sc = reference_density(ReferenceDensity::Semicircle { center: 0.0, variance: 1.0 }, 4000).unwrap();
    let expect = 0.5 + 0.5 * (2.0 * std::f64::consts::PI).ln();
    assert!((chi_one_var(&sc) - expect).abs() < 2e-3);
    assert!((chi_one_var(&sc) - 1.41894).abs() < 2e-3);
}

#[test]
fn unit_interval_equilibrium_is_arcsine() {
    let eq = equilibrium_measure(&interval(-1.0, 1.0), 2000).unwrap();
    assert!((eq.robin + LN2).abs() < 1e-3, "robin {}", eq.robin);
    assert!(eq.potential_spread() < 5e-3, "spread {}", eq.potential_spread());
    let arc = ReferenceDensity::Arcsine { a: -1.0, b: 1.0 };
    let h = eq.measure.widths().unwrap();
    let l1: f64 = eq
        .measure
        .points()
        .iter()
        .zip(eq.measure.weights())
        .zip(h)
        .filter(|((x, _), _)| x.abs() <= 0.95)
        .map(|((x, w), h)| (w / h - arc.density(*x)).abs() * h)
        .sum();
    assert!(l1 < 5e-2, "weighted L1 {l1}");
    assert!((capacity(&interval(-1.0, 1.0), 2000).unwrap() - 0.5).abs() < 1e-3);
    assert!((kappa_one_var(&interval(-1.0, 1.0), 2000).unwrap() - (THETA - LN2)).abs() < 2e-3);
}

#[test]
fn scaled_interval_capacity() {
    // cap([a,b]) = (b-a)/4
    let eq = equilibrium_measure(&interval(-2.0, 2.0), 2000).unwrap();
    assert!(eq.robin.abs() < 1e-3);
    assert!((capacity(&interval(-2.0, 2.0), 2000).unwrap() - 1.0).abs() < 2e-3);
    assert!((kappa_one_var(&interval(-2.0, 2.0), 2000).unwrap() - THETA).abs() < 2e-3);
    assert!((kappa_one_var(&interval(-2.0, 2.0), 2000).unwrap() - 1.66894).abs() < 2e-3);
}

/// Fekete points with `per` points in each of the given intervals, by cyclic
/// coordinate ascent. Returns the discrete energy `2/(N(N-1)) sum_{i<j} log|x_i-x_j|`.
fn fekete_energy(intervals: &[(f64, f64)], per: usize) -> f64 {
    let mut x: Vec<f64> = Vec::new();
    for &(a, b) in intervals {
        for i in 0..per {
            let t = (i as f64 + 0.5) / per as f64;
            x.push(a + (b - a) * 0.5 * (1.0 - (std::f64::consts::PI * t).cos()));
        }
    }
    let n = x.len();
    let owner: Vec<(f64, f64)> = intervals.iter().flat_map(|&iv| std::iter::repeat(iv).take(per)).collect();
    let total = |x: &[f64], i: usize, xi: f64| -> f64 {
        (0..x.len()).filter(|&j| j != i).map(|j| (xi - x[j]).abs().ln()).sum()
    };
    for _sweep in 0..400 {
        for i in 0..n {
            let (a, b) = owner[i];
            // The objective is concave between neighbouring points; golden section on the
            // bracket formed by the neighbours inside the owning interval.
            let mut lo = a;
            let mut hi = b;
            for j in 0..n {
                if j != i && x[j] >= a && x[j] <= b {
                    if x[j] < x[i] {
                        lo = lo.max(x[j]);
                    } else {
                        hi = hi.min(x[j]);
                    }
                }
            }
            let (mut l, mut r) = (lo, hi);
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..60 {
                let m1 = r - phi * (r - l);
                let m2 = l + phi * (r - l);
                if total(&x, i, m1) < total(&x, i, m2) {
                    l = m1;
                } else {
                    r = m2;
                }
            }
            x[i] = 0.5 * (l + r);
        }
    }
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += (x[i] - x[j]).abs().ln();
        }
    }
    2.0 * s / (n * (n - 1)) as f64
}

#[test]
fn two_interval_capacity_against_fekete_oracle() {
    let set: RealCompact = "[0,1] u [2,3]".parse().unwrap();
    let eq = equilibrium_measure(&set, 2000).unwrap();
    // Fekete energies approach log cap from above like c log N / N; extrapolate
    // with a fit in (log N / N, 1/N) through three sizes.
    let sizes = [20usize, 30, 40];
    let e: Vec<f64> = sizes.iter().map(|&p| fekete_energy(&[(0.0, 1.0), (2.0, 3.0)], p)).collect();
    let basis = |n: f64| [1.0, n.ln() / n, 1.0 / n];
    let rows: Vec<[f64; 3]> = sizes.iter().map(|&p| basis(2.0 * p as f64)).collect();
    let limit = solve3(&rows, &e)[0];
    assert!((eq.robin - limit).abs() < 2e-2, "robin {} vs fekete {}", eq.robin, limit);
    // Independent closed form: the set is the preimage of [1/4, 9/4] under
    // (x - 3/2)^2, so cap = sqrt((9/4 - 1/4)/4).
    assert!((eq.robin - 0.5f64.sqrt().ln()).abs() < 2e-3, "robin {}", eq.robin);
}

fn solve3(rows: &[[f64; 3]], rhs: &[f64]) -> [f64; 3] {
    let mut a = [[0.0; 4]; 3];
    for i in 0..3 {
        a[i][..3].copy_from_slice(&rows[i]);
        a[i][3] = rhs[i];
    }
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        for r in 0..3 {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..4 {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    [a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]]
}

fn random_measure(rng: &mut ChaCha8Rng, base: &DiscretizedMeasure) -> DiscretizedMeasure {
    let w: Vec<f64> = (0..base.len()).map(|_| rng.random::<f64>().powi(3)).collect();
    base.with_weights(w).unwrap()
}

#[test]
fn energy_is_concave() {
    let base = reference_density(ReferenceDensity::Arcsine { a: -1.0, b: 1.0 }, 200).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let mu = random_measure(&mut rng, &base);
        let nu = random_measure(&mut rng, &base);
        let lam: f64 = rng.random();
        let mix: Vec<f64> = mu.weights().iter().zip(nu.weights()).map(|(a, b)| lam * a + (1.0 - lam) * b).collect();
        let mix = base.with_weights(mix).unwrap();
        assert!(log_energy(&mix) >= lam * log_energy(&mu) + (1.0 - lam) * log_energy(&nu) - 1e-10);
    }
}

#[test]
fn equilibrium_beats_random_measures() {
    let eq = equilibrium_measure(&interval(-1.0, 1.5), 300).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let nu = random_measure(&mut rng, &eq.measure);
        assert!(eq.robin >= log_energy(&nu));
    }
    assert!((log_energy(&eq.measure) - eq.robin).abs() < 1e-10);
}

#[test]
fn translation_and_scaling() {
    let base = reference_density(ReferenceDensity::Semicircle { center: 0.0, variance: 1.0 }, 500).unwrap();
    let shifted = DiscretizedMeasure::grid(
        base.points().iter().map(|x| x + 3.7).collect(),
        base.weights().to_vec(),
        base.cell_width().unwrap(),
    )
    .unwrap();
    assert!((log_energy(&shifted) - log_energy(&base)).abs() < 1e-10);
    let s = 2.5;
    let scaled = DiscretizedMeasure::grid(
        base.points().iter().map(|x| x * s).collect(),
        base.weights().to_vec(),
        base.cell_width().unwrap() * s,
    )
    .unwrap();
    assert!((log_energy(&scaled) - log_energy(&base) - s.ln()).abs() < 1e-10);

    let k: RealCompact = "[0,1] u [1.5,4]".parse().unwrap();
    let c1 = capacity(&k, 600).unwrap();
    let c2 = capacity(&k.scaled(3.0).unwrap(), 600).unwrap();
    let c3 = capacity(&k.shifted(-10.0).unwrap(), 600).unwrap();
    assert!((c2 - 3.0 * c1).abs() < 1e-3);
    assert!((c3 - c1).abs() < 1e-3);
}

#[test]
fn chi_and_kappa_agree_at_equilibrium() {
    for set in ["[-1,1]", "[0,3]", "[0,1] u [2,3]"] {
        let k: RealCompact = set.parse().unwrap();
        let eq = equilibrium_measure(&k, 1000).unwrap();
        let kappa = kappa_one_var(&k, 1000).unwrap();
        assert!((chi_one_var(&eq.measure) - kappa).abs() < 2e-3, "{set}");
        let report = CapacityReport::from_equilibrium(&eq);
        assert!((report.kappa - kappa).abs() < 1e-12);
    }
}
