//! Equilibrium measures by away-step Frank-Wolfe.
//!
//! On a fixed grid the discretized energy is the quadratic form `w' K w` with
//! `K_ij = log|x_i - x_j|` off the diagonal and `K_ii = log h_i - 3/2`. The
//! equilibrium measure maximizes it over the probability simplex. Every
//! iteration moves toward the vertex with the largest gradient entry, or away
//! from the active vertex with the smallest, whichever has the larger
//! directional derivative; the step length is the exact maximizer along the
//! segment.

use rayon::prelude::*;

use super::measure::DiscretizedMeasure;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub gap_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { gap_tolerance: 1e-7, max_iterations: 50_000 }
    }
}

#[derive(Clone, Debug)]
pub struct SolverReport {
    pub iterations: usize,
    pub gap: f64,
    pub converged: bool,
}

/// Iterations between exact recomputations of the gradient.
const REFRESH: usize = 2_000;

pub(crate) struct EnergyKernel {
    n: usize,
    k: Vec<f64>,
}

impl EnergyKernel {
    pub fn new(points: &[f64], widths: &[f64]) -> Self {
        let n = points.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { widths[i].ln() - 1.5 } else { (points[i] - points[j]).abs().ln() })
                    .collect()
            })
            .collect();
        EnergyKernel { n, k: rows.concat() }
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.k[i * self.n..(i + 1) * self.n]
    }

    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        (0..self.n).into_par_iter().map(|i| dot(self.row(i), w)).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximize `w' K w` over the simplex, starting from uniform weights.
/// Returns the weights, `K w` (the discrete potential) and a report.
pub(crate) fn maximize_energy(kernel: &EnergyKernel, opts: SolverOptions) -> (Vec<f64>, Vec<f64>, SolverReport) {
    let n = kernel.n;
    let mut w = vec![1.0 / n as f64; n];
    // u = K w; the gradient of w'Kw is 2u.
    let mut u = kernel.apply(&w);
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..opts.max_iterations {
        iterations = it;
        if it > 0 && it % REFRESH == 0 {
            u = kernel.apply(&w);
        }
        let wu = dot(&w, &u);
        let (s, &us) = u.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let (a, ua) = w
            .iter()
            .zip(&u)
            .enumerate()
            .filter(|(_, (&wi, _))| wi > 0.0)
            .map(|(i, (_, &ui))| (i, ui))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        // Frank-Wolfe gap of the objective w'Kw.
        gap = 2.0 * (us - wu);
        if gap < opts.gap_tolerance {
            break;
        }
        let toward = us - wu;
        let away = wu - ua;
        if toward >= away {
            // w <- (1-g) w + g e_s; f(g) = wKw + 2g(u_s - wu) + g^2 (K_ss - 2u_s + wu)
            let curv = kernel.row(s)[s] - 2.0 * us + wu;
            let g = if curv >= 0.0 { 1.0 } else { (-toward / curv).min(1.0) };
            for wi in w.iter_mut() {
                *wi *= 1.0 - g;
            }
            w[s] += g;
            let ks = kernel.row(s);
            for (ui, &kj) in u.iter_mut().zip(ks) {
                *ui = (1.0 - g) * *ui + g * kj;
            }
        } else {
            // w <- (1+g) w - g e_a, g <= w_a / (1 - w_a)
            let gmax = if w[a] < 1.0 { w[a] / (1.0 - w[a]) } else { f64::INFINITY };
            let curv = kernel.row(a)[a] - 2.0 * ua + wu;
            let g = if curv >= 0.0 { gmax } else { (-away / curv).min(gmax) };
            let drop = g >= gmax;
            for wi in w.iter_mut() {
                *wi *= 1.0 + g;
            }
            w[a] -= g;
            if drop || w[a] < 0.0 {
                w[a] = 0.0;
            }
            let ka = kernel.row(a);
            for (ui, &kj) in u.iter_mut().zip(ka) {
                *ui = (1.0 + g) * *ui - g * kj;
            }
        }
    }
    let total: f64 = w.iter().sum();
    for wi in w.iter_mut() {
        *wi /= total;
    }
    let u = kernel.apply(&w);
    let converged = gap < opts.gap_tolerance;
    (w, u, SolverReport { iterations, gap, converged })
}

/// Solve on an explicit grid.
pub(crate) fn solve_on_grid(
    points: Vec<f64>,
    widths: Vec<f64>,
    opts: SolverOptions,
) -> Result<(DiscretizedMeasure, Vec<f64>, SolverReport)> {
    let kernel = EnergyKernel::new(&points, &widths);
    let (w, u, report) = maximize_energy(&kernel, opts);
    let mu = DiscretizedMeasure::cells(points, w, widths)?;
    Ok((mu, u, report))
}
