//! Exact eigenvalue sampling for the uniform measure on the operator-norm
//! ball.
//!
//! Under Lebesgue measure on `M_k^{sa}` the unordered eigenvalues have joint
//! density proportional to `prod_{i<j} (l_i - l_j)^2`, and the eigenvectors are
//! Haar distributed and independent of them. Restricting to `[-1,1]^k` and
//! rejecting uniform proposals with probability `V(l)^2 / max V^2` gives exact
//! draws. The maximum of the squared Vandermonde on the cube is attained at
//! the Fekete points: `+-1` together with the zeros of `P'_{k-1}`.

use std::sync::OnceLock;

use rand::Rng;

/// Largest `k` supported by rejection sampling.
pub const BALL_DIM_CAP: usize = 12;

/// `log prod_{i<j} (l_i - l_j)^2`.
pub fn log_vandermonde_sq(l: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..l.len() {
        for j in (i + 1)..l.len() {
            s += 2.0 * (l[i] - l[j]).abs().ln();
        }
    }
    s
}

/// `(P_n(x), P'_n(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for m in 1..n {
        let m = m as f64;
        let p2 = ((2.0 * m + 1.0) * x * p1 - m * p0) / (m + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        0.5 * nf * (nf + 1.0) * x.signum().powi(n as i32 + 1)
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Fekete points of `[-1, 1]` for `k` points, sorted.
pub fn fekete_points(k: usize) -> Vec<f64> {
    match k {
        0 => return vec![],
        1 => return vec![0.0],
        _ => {}
    }
    let n = k - 1;
    let mut pts = vec![-1.0];
    // Interior zeros of P'_n, bracketed on a fine grid and bisected.
    let grid = 20_000;
    let f = |x: f64| legendre(n, x).1;
    let mut prev_x = -1.0 + 1e-9;
    let mut prev_f = f(prev_x);
    for g in 1..=grid {
        let x = -1.0 + 1e-9 + (2.0 - 2e-9) * g as f64 / grid as f64;
        let fx = f(x);
        if prev_f == 0.0 {
            pts.push(prev_x);
        } else if prev_f * fx < 0.0 {
            let (mut lo, mut hi) = (prev_x, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(lo) * f(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            pts.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = fx;
    }
    pts.push(1.0);
    debug_assert_eq!(pts.len(), k);
    pts
}

/// `log max_{[-1,1]^k} prod_{i<j} (l_i - l_j)^2`, padded by a relative
/// `1e-9` so rounding in the Fekete points can only loosen the bound.
pub fn log_max_vandermonde_sq(k: usize) -> f64 {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = CACHE.get_or_init(|| {
        (0..=BALL_DIM_CAP).map(|k| log_vandermonde_sq(&fekete_points(k)) + 1e-9).collect()
    });
    table.get(k).copied().unwrap_or_else(|| log_vandermonde_sq(&fekete_points(k)) + 1e-9)
}

/// One exact draw of the (unordered) eigenvalues of a uniform element of
/// `B(k, 1)`. Also returns the number of proposals used.
pub fn sample_unit_ball_eigenvalues<R: Rng + ?Sized>(k: usize, rng: &mut R) -> (Vec<f64>, u64) {
    let bound = log_max_vandermonde_sq(k);
    let mut lambda = vec![0.0; k];
    let mut tries = 0u64;
    loop {
        tries += 1;
        for l in lambda.iter_mut() {
            *l = rng.random_range(-1.0..=1.0);
        }
        let u: f64 = rng.random();
        if u.ln() <= log_vandermonde_sq(&lambda) - bound {
            return (lambda, tries);
        }
    }
}
