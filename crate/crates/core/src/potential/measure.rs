use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Weighted point masses on the line approximating a compactly supported
/// probability measure.
///
/// Grid-based measures carry a cell width per point: the mass at `x_i` is
/// spread uniformly over a cell of that width when computing self-energy.
/// Atomic measures carry no widths and have infinite self-energy.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedMeasure {
    points: Vec<f64>,
    weights: Vec<f64>,
    widths: Option<Vec<f64>>,
}

impl DiscretizedMeasure {
    /// Point masses. Weights are normalized to sum to one.
    pub fn atoms(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::build(points, weights, None)
    }

    /// Uniform grid of cell width `h` centred at `points`.
    pub fn grid(points: Vec<f64>, weights: Vec<f64>, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(invalid("cell width must be positive"));
        }
        let n = points.len();
        Self::build(points, weights, Some(vec![h; n]))
    }

    /// Grid whose cells may have different widths (one per point).
    pub fn cells(points: Vec<f64>, weights: Vec<f64>, widths: Vec<f64>) -> Result<Self> {
        if widths.len() != points.len() || widths.iter().any(|&h| !(h > 0.0)) {
            return Err(invalid("one positive cell width per point is required"));
        }
        Self::build(points, weights, Some(widths))
    }

    fn build(points: Vec<f64>, weights: Vec<f64>, widths: Option<Vec<f64>>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(invalid("measure needs matching, nonempty points and weights"));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("measure points must be strictly increasing"));
        }
        if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(invalid("measure weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(invalid("measure has zero total mass"));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(DiscretizedMeasure { points, weights, widths })
    }

    /// Same grid, new weights (normalized).
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::build(self.points.clone(), weights, self.widths.clone())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn widths(&self) -> Option<&[f64]> {
        self.widths.as_deref()
    }

    /// The common cell width when the grid is uniform.
    pub fn cell_width(&self) -> Option<f64> {
        let w = self.widths.as_ref()?;
        let h = w[0];
        w.iter().all(|&x| x == h).then_some(h)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `int x^p dmu` at the cell centres.
    pub fn moment(&self, p: i32) -> f64 {
        self.points.iter().zip(&self.weights).map(|(x, w)| w * x.powi(p)).sum()
    }

    /// Density values `w_i / h_i` (grid measures only).
    pub fn density(&self) -> Option<Vec<f64>> {
        let h = self.widths.as_ref()?;
        Some(self.weights.iter().zip(h).map(|(w, h)| w / h).collect())
    }

    /// Logarithmic potential `U(x) = int log|x - t| dmu(t)` at each support
    /// point. The own-cell term uses the same diagonal as [`log_energy`], so
    /// `I(mu) = sum_i w_i U(x_i)`.
    pub fn potential_at_points(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let xi = self.points[i];
                let mut s = 0.0;
                for j in 0..n {
                    if j != i {
                        s += self.weights[j] * (xi - self.points[j]).abs().ln();
                    }
                }
                s + self.weights[i] * self_cell_potential(self.widths.as_ref().map(|h| h[i]))
            })
            .collect()
    }

    /// Rows of `x, weight` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,weight\n");
        for (x, w) in self.points.iter().zip(&self.weights) {
            out.push_str(&format!("{x},{w}\n"));
        }
        out
    }
}

fn self_cell_potential(h: Option<f64>) -> f64 {
    match h {
        Some(h) => h.ln() - 1.5,
        None => f64::NEG_INFINITY,
    }
}

/// `I(mu) = iint log|s - t| dmu(s) dmu(t)`.
///
/// Off-diagonal cells interact through their centres; each diagonal cell
/// contributes `w_i^2 (log h_i - 3/2)`, the exact energy of uniform mass on a
/// width-`h_i` cell. Atomic measures have energy `-inf`.
pub fn log_energy(mu: &DiscretizedMeasure) -> f64 {
    let Some(widths) = mu.widths.as_ref() else {
        return f64::NEG_INFINITY;
    };
    let n = mu.len();
    let (x, w) = (&mu.points, &mu.weights);
    // Row sums in parallel, reduced sequentially so the result does not
    // depend on the thread count.
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in (i + 1)..n {
                s += w[j] * (x[j] - x[i]).ln();
            }
            2.0 * w[i] * s + w[i] * w[i] * (widths[i].ln() - 1.5)
        })
        .collect();
    rows.iter().sum()
}

/// Off-diagonal part `sum_{i != j} w_i w_j log|x_i - x_j|` alone.
pub fn off_diagonal_energy(mu: &DiscretizedMeasure) -> f64 {
    let n = mu.len();
    let (x, w) = (&mu.points, &mu.weights);
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * w[i] * w[j] * (x[j] - x[i]).ln();
        }
    }
    s
}

/// A finite union of disjoint closed intervals, possibly degenerate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealCompact {
    intervals: Vec<(f64, f64)>,
}

impl RealCompact {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(invalid("compact set must contain at least one interval"));
        }
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(invalid(format!("bad interval [{a}, {b}]")));
            }
        }
        intervals.sort_by(|p, q| p.0.total_cmp(&q.0));
        if intervals.windows(2).any(|w| w[0].1 >= w[1].0) {
            return Err(invalid("intervals must be disjoint"));
        }
        Ok(RealCompact { intervals })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn point(x: f64) -> Result<Self> {
        Self::new(vec![(x, x)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.intervals.iter().map(|&(a, b)| if s >= 0.0 { (s * a, s * b) } else { (s * b, s * a) }).collect())
    }

    pub fn shifted(&self, c: f64) -> Result<Self> {
        Self::new(self.intervals.iter().map(|&(a, b)| (a + c, b + c)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| a.abs().max(b.abs())).fold(0.0, f64::max)
    }

    /// Uniform grid over the positive-length intervals: cells per interval
    /// proportional to its length, at least [`super::MIN_CELLS_PER_INTERVAL`].
    pub fn grid(&self, gridsize: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let parts: Vec<(f64, f64)> = self.intervals.iter().copied().filter(|(a, b)| b > a).collect();
        if parts.is_empty() {
            return Err(invalid("grid requires an interval of positive length"));
        }
        let total = self.total_length();
        let mut points = Vec::with_capacity(gridsize);
        let mut widths = Vec::with_capacity(gridsize);
        for (a, b) in parts {
            let share = ((b - a) / total * gridsize as f64).round() as usize;
            let cells = share.max(super::MIN_CELLS_PER_INTERVAL);
            let h = (b - a) / cells as f64;
            for i in 0..cells {
                points.push(a + (i as f64 + 0.5) * h);
                widths.push(h);
            }
        }
        Ok((points, widths))
    }
}

impl FromStr for RealCompact {
    type Err = crate::Error;

    /// `"[-1,1]"`, `"[0,1] u [2,3]"`, `"[0,1],[2,3]"`, `"{0}"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut intervals = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',' || c == 'u' || c == 'U' || c == '∪');
            if rest.is_empty() {
                break;
            }
            let (open, close) = match rest.chars().next().unwrap() {
                '[' => ('[', ']'),
                '{' => ('{', '}'),
                c => return Err(invalid(format!("expected '[' or '{{', found '{c}'"))),
            };
            let end = rest.find(close).ok_or_else(|| invalid(format!("unclosed '{open}'")))?;
            let body = &rest[1..end];
            let nums: Vec<f64> = body
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| invalid(format!("bad number '{t}': {e}"))))
                .collect::<Result<_>>()?;
            match (open, nums.as_slice()) {
                ('[', [a, b]) => intervals.push((*a, *b)),
                ('{', [x]) => intervals.push((*x, *x)),
                _ => return Err(invalid(format!("malformed set element '{}'", &rest[..=end]))),
            }
            rest = &rest[end + 1..];
        }
        RealCompact::new(intervals)
    }
}

impl fmt::Display for RealCompact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b)) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " u ")?;
            }
            if a == b {
                write!(f, "{{{a}}}")?;
            } else {
                write!(f, "[{a},{b}]")?;
            }
        }
        Ok(())
    }
}
