//! Closed-form normalizations.
//!
//! Lebesgue measure on `M_k^{sa}` is taken with respect to the Euclidean
//! structure `<A, B> = Tr(AB)`. In that convention the Gaussian density
//! `c_k exp(-(k/2) Tr A^2)` is a probability density exactly when
//! `c_k = (2 pi)^{-k^2/2} k^{k^2/2}`, and Weyl integration reads
//!
//! ```text
//! dA = (2 pi)^{k(k-1)/2} / (1! 2! ... k!) * prod_{i<j} (l_i - l_j)^2 dl  dU
//! ```
//!
//! with `dU` the Haar probability measure.

use statrs::function::gamma::ln_gamma;

/// `log c_k` for the `n`-fold product Gaussian measure on `(M_k^{sa})^n`.
pub fn log_c_k(k: usize, n: usize) -> f64 {
    let k = k as f64;
    0.5 * n as f64 * k * k * (k.ln() - (2.0 * std::f64::consts::PI).ln())
}

/// Log of the Weyl integration constant `(2 pi)^{k(k-1)/2} / prod_{j<=k} j!`.
pub fn log_weyl_constant(k: usize) -> f64 {
    let kf = k as f64;
    let pairs = 0.5 * kf * (kf - 1.0);
    let log_superfactorial: f64 = (1..=k).map(|j| ln_gamma(j as f64 + 1.0)).sum();
    pairs * (2.0 * std::f64::consts::PI).ln() - log_superfactorial
}

/// `log S_k(alpha, beta, gamma)`, the Selberg integral over `[0,1]^k` of
/// `prod t_i^{alpha-1} (1-t_i)^{beta-1} prod_{i<j} |t_i - t_j|^{2 gamma}`.
pub fn log_selberg(k: usize, alpha: f64, beta: f64, gamma: f64) -> f64 {
    let kf = k as f64;
    (0..k)
        .map(|j| {
            let j = j as f64;
            ln_gamma(alpha + j * gamma) + ln_gamma(beta + j * gamma) + ln_gamma(1.0 + (j + 1.0) * gamma)
                - ln_gamma(alpha + beta + (kf + j - 1.0) * gamma)
                - ln_gamma(1.0 + gamma)
        })
        .sum()
}

/// `log` of `int_{[-1,1]^k} prod_{i<j} (l_i - l_j)^2 dl`.
pub fn log_vandermonde_integral(k: usize) -> f64 {
    // Substituting l = 2t - 1 contributes 2^k from dl and 4 per pair.
    let kf = k as f64;
    (kf + kf * (kf - 1.0)) * std::f64::consts::LN_2 + log_selberg(k, 1.0, 1.0, 1.0)
}

/// Log-volume of the unit operator-norm ball `B(k, 1)` in `M_k^{sa}`.
pub fn log_unit_ball_volume(k: usize) -> f64 {
    log_weyl_constant(k) + log_vandermonde_integral(k)
}

/// Log-volume of `B(k, R)^n`, the product of `n` operator-norm balls.
pub fn log_ball_volume(k: usize, n: usize, radius: f64) -> f64 {
    let kf = k as f64;
    n as f64 * (kf * kf * radius.ln() + log_unit_ball_volume(k))
}
