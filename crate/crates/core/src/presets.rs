//! Ready-made microstate specifications.
//!
//! Semicircular systems: `n` free semicircular variables of variance 1, with
//! `||X_j|| = 2` and `||sum_j c_j X_j|| = 2 |c|`.
//!
//! One self-adjoint variable with spectrum `[a, b]`: the coordinate
//! constraint `||X1|| = max(|a|, |b|)` together with the Chebyshev
//! polynomials `T_d((2 X1 - a - b) / (b - a))`, `d = 1..=degree`, each of
//! norm 1.
//!
//! The vacuous spec: no constraints at all, so the microstate set is the
//! whole ball `B(k, M)^n`.

use crate::error::{invalid, Result};
use crate::microstates::{Constraint, MicrostateSpec};
use crate::ncpoly::NCPolynomial;

pub const DEFAULT_CHEBYSHEV_DEGREE: usize = 3;

/// Semicircular preset. Each entry of `combinations` is a real coefficient
/// vector of length `n` adding the constraint `||sum c_j X_j|| = 2 |c|`.
pub fn semicircular(n: usize, k: usize, epsilon: f64, combinations: &[Vec<f64>]) -> Result<MicrostateSpec> {
    if n == 0 {
        return Err(invalid("semicircular preset needs n >= 1"));
    }
    let mut extra = Vec::with_capacity(combinations.len());
    for c in combinations {
        if c.len() != n {
            return Err(invalid(format!("coefficient vector has length {}, expected {n}", c.len())));
        }
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        extra.push(Constraint::new(NCPolynomial::linear(c), 2.0 * norm)?);
    }
    MicrostateSpec::standard(n, 0, k, epsilon, &vec![2.0; n], extra)
}

/// Chebyshev polynomial `T_d(alpha X1 + beta)` in one variable.
pub fn chebyshev(d: usize, alpha: f64, beta: f64) -> Result<NCPolynomial> {
    let y = NCPolynomial::linear(&[alpha]).add(&NCPolynomial::constant(1, beta.into()))?;
    let mut prev = NCPolynomial::constant(1, 1.0.into());
    if d == 0 {
        return Ok(prev);
    }
    let mut cur = y.clone();
    for _ in 1..d {
        let next = y.mul(&cur)?.scale(2.0.into()).add(&prev.scale((-1.0).into()))?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// One-variable preset for spectrum `[a, b]`.
pub fn interval(a: f64, b: f64, k: usize, epsilon: f64, degree: usize) -> Result<MicrostateSpec> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(invalid(format!("interval preset needs a < b, got [{a}, {b}]")));
    }
    if degree == 0 {
        return Err(invalid("interval preset needs degree >= 1"));
    }
    let alpha = 2.0 / (b - a);
    let beta = -(a + b) / (b - a);
    let extra = (1..=degree)
        .map(|d| Constraint::new(chebyshev(d, alpha, beta)?, 1.0))
        .collect::<Result<Vec<_>>>()?;
    MicrostateSpec::standard(1, 0, k, epsilon, &[a.abs().max(b.abs())], extra)
}

/// Vacuous spec with uniform bound `M = radius`. `epsilon` only sets the
/// covering scale; it does not change the set.
pub fn ball(n: usize, k: usize, epsilon: f64, radius: f64) -> Result<MicrostateSpec> {
    MicrostateSpec::new(n, 0, k, epsilon, radius, vec![])
}

/// Parse a preset name such as `semicircular:2`, `interval:-2,2` or `ball:1`.
pub fn from_name(name: &str, k: usize, epsilon: f64, degree: usize) -> Result<MicrostateSpec> {
    let (kind, args) = name.split_once(':').unwrap_or((name, ""));
    match kind {
        "semicircular" => {
            let n = if args.is_empty() { 1 } else { args.trim().parse().map_err(|_| invalid(format!("bad preset {name:?}")))? };
            semicircular(n, k, epsilon, &[])
        }
        "interval" => {
            let ends: Vec<f64> = args
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| invalid(format!("bad preset {name:?}")))?;
            match ends.as_slice() {
                [a, b] => interval(*a, *b, k, epsilon, degree),
                _ => Err(invalid(format!("interval preset needs two endpoints, got {name:?}"))),
            }
        }
        "ball" => {
            let r = if args.is_empty() { 1.0 } else { args.trim().parse().map_err(|_| invalid(format!("bad preset {name:?}")))? };
            ball(1, k, epsilon, r)
        }
        _ => Err(invalid(format!(
            "unknown preset {name:?}; expected semicircular[:n], interval:a,b or ball[:R]"
        ))),
    }
}
