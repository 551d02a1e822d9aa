//! One-variable potential theory.
//!
//! Sign convention: the logarithmic energy is `I(mu) = iint log|s-t|`, which
//! is concave in `mu`. The free entropy of a single self-adjoint variable with
//! distribution `mu` is `I(mu) + THETA`, and its free capacity is
//! `log cap(spectrum) + THETA`, where `log cap(K)` is the maximal energy over
//! probability measures on `K` (the Robin constant in this convention).

mod equilibrium;
mod measure;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use equilibrium::{SolverOptions, SolverReport};
pub use measure::{log_energy, off_diagonal_energy, DiscretizedMeasure, RealCompact};

/// `3/4 + (1/2) log 2 pi`.
pub const THETA: f64 = 0.75 + 0.918_938_533_204_672_8;

/// Smallest accepted grid for equilibrium problems.
pub const MIN_GRIDSIZE: usize = 50;
/// Every positive-length interval gets at least this many cells.
pub const MIN_CELLS_PER_INTERVAL: usize = 50;

#[derive(Clone, Debug)]
pub struct Equilibrium {
    pub measure: DiscretizedMeasure,
    /// Maximal discretized energy, `log cap`.
    pub robin: f64,
    /// Discrete potential `U_i = sum_j K_ij w_j` at each grid point.
    pub potential: Vec<f64>,
    pub report: SolverReport,
}

impl Equilibrium {
    /// `max - min` of the potential over the support.
    pub fn potential_spread(&self) -> f64 {
        let (lo, hi) = self
            .measure
            .weights()
            .iter()
            .zip(&self.potential)
            .filter(|(&w, _)| w > 0.0)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, &u)| (lo.min(u), hi.max(u)));
        hi - lo
    }
}

fn check_gridsize(gridsize: usize) -> Result<()> {
    if gridsize < MIN_GRIDSIZE {
        return Err(invalid(format!("gridsize must be at least {MIN_GRIDSIZE}, got {gridsize}")));
    }
    Ok(())
}

/// Energy-maximizing probability measure on a grid over `set`.
pub fn equilibrium_measure(set: &RealCompact, gridsize: usize) -> Result<Equilibrium> {
    equilibrium_measure_with(set, gridsize, SolverOptions::default())
}

pub fn equilibrium_measure_with(set: &RealCompact, gridsize: usize, opts: SolverOptions) -> Result<Equilibrium> {
    check_gridsize(gridsize)?;
    if set.total_length() <= 0.0 {
        return Err(invalid("equilibrium measure needs a set of positive length"));
    }
    let (points, widths) = set.grid(gridsize)?;
    let (measure, potential, report) = equilibrium::solve_on_grid(points, widths, opts)?;
    let robin = measure.weights().iter().zip(&potential).map(|(w, u)| w * u).sum();
    Ok(Equilibrium { measure, robin, potential, report })
}

/// Logarithmic capacity; zero for finite point sets.
pub fn capacity(set: &RealCompact, gridsize: usize) -> Result<f64> {
    check_gridsize(gridsize)?;
    if set.total_length() <= 0.0 {
        return Ok(0.0);
    }
    Ok(equilibrium_measure(set, gridsize)?.robin.exp())
}

/// Free entropy of one variable with distribution `mu`: `I(mu) + THETA`.
pub fn chi_one_var(mu: &DiscretizedMeasure) -> f64 {
    log_energy(mu) + THETA
}

/// Free capacity of a self-adjoint element with spectrum `set`.
pub fn kappa_one_var(set: &RealCompact, gridsize: usize) -> Result<f64> {
    let cap = capacity(set, gridsize)?;
    Ok(if cap > 0.0 { cap.ln() + THETA } else { f64::NEG_INFINITY })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ReferenceDensity {
    /// Semicircle law with the given centre and variance; support
    /// `[c - 2 sqrt(v), c + 2 sqrt(v)]`.
    Semicircle { center: f64, variance: f64 },
    /// Arcsine law on `[a, b]`.
    Arcsine { a: f64, b: f64 },
}

impl ReferenceDensity {
    pub fn support(&self) -> (f64, f64) {
        match *self {
            ReferenceDensity::Semicircle { center, variance } => {
                let r = 2.0 * variance.sqrt();
                (center - r, center + r)
            }
            ReferenceDensity::Arcsine { a, b } => (a, b),
        }
    }

    /// Distribution function in the standardized variable `u` in `[-1, 1]`.
    fn standard_cdf(&self, u: f64) -> f64 {
        let u = u.clamp(-1.0, 1.0);
        match self {
            ReferenceDensity::Semicircle { .. } => {
                0.5 + (u * (1.0 - u * u).sqrt() + u.asin()) / std::f64::consts::PI
            }
            ReferenceDensity::Arcsine { .. } => 0.5 + u.asin() / std::f64::consts::PI,
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo || x >= hi {
            return 0.0;
        }
        let half = 0.5 * (hi - lo);
        let u = (x - 0.5 * (lo + hi)) / half;
        match self {
            ReferenceDensity::Semicircle { .. } => 2.0 / std::f64::consts::PI * (1.0 - u * u).sqrt() / half,
            ReferenceDensity::Arcsine { .. } => 1.0 / (std::f64::consts::PI * (1.0 - u * u).sqrt()) / half,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ReferenceDensity::Semicircle { center, variance } if center.is_finite() && variance > 0.0 => Ok(()),
            ReferenceDensity::Arcsine { a, b } if a.is_finite() && b.is_finite() && a < b => Ok(()),
            _ => Err(invalid(format!("invalid reference density parameters: {self:?}"))),
        }
    }
}

/// Grid discretization with exact cell masses. Points and weights are
/// mirror-symmetric about the centre of the support.
pub fn reference_density(density: ReferenceDensity, gridsize: usize) -> Result<DiscretizedMeasure> {
    density.validate()?;
    if gridsize < 2 {
        return Err(invalid("reference density needs at least two cells"));
    }
    let (lo, hi) = density.support();
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let h_std = 2.0 / gridsize as f64;
    let mut offsets = vec![0.0; gridsize];
    let mut weights = vec![0.0; gridsize];
    for i in 0..gridsize.div_ceil(2) {
        let left = -1.0 + i as f64 * h_std;
        let right = if 2 * i + 1 == gridsize { 1.0 - i as f64 * h_std } else { left + h_std };
        let mass = density.standard_cdf(right) - density.standard_cdf(left);
        let off = -1.0 + (i as f64 + 0.5) * h_std;
        let j = gridsize - 1 - i;
        offsets[i] = off;
        offsets[j] = -off;
        weights[i] = mass;
        weights[j] = mass;
    }
    let points = offsets.iter().map(|o| centre + half * o).collect();
    DiscretizedMeasure::grid(points, weights, half * h_std)
}

/// JSON payload for capacity computations.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CapacityReport {
    pub capacity: f64,
    pub robin: f64,
    pub chi: f64,
    pub kappa: f64,
}

impl CapacityReport {
    pub fn from_equilibrium(eq: &Equilibrium) -> Self {
        CapacityReport {
            capacity: eq.robin.exp(),
            robin: eq.robin,
            chi: chi_one_var(&eq.measure),
            kappa: eq.robin + THETA,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_value() {
        assert!((THETA - (0.75 + 0.5 * (2.0 * std::f64::consts::PI).ln())).abs() < 1e-15);
    }

    #[test]
    fn point_sets_are_polar() {
        let k = RealCompact::point(0.0).unwrap();
        assert_eq!(capacity(&k, 100).unwrap(), 0.0);
        assert_eq!(kappa_one_var(&k, 100).unwrap(), f64::NEG_INFINITY);
        assert!(equilibrium_measure(&k, 100).is_err());
    }

    #[test]
    fn small_grid_rejected() {
        let k = RealCompact::interval(-1.0, 1.0).unwrap();
        assert!(equilibrium_measure(&k, 49).is_err());
    }

    #[test]
    fn reference_density_moments() {
        let arc = reference_density(ReferenceDensity::Arcsine { a: -1.0, b: 1.0 }, 4000).unwrap();
        assert!((arc.moment(2) - 0.5).abs() < 1e-3);
        assert!(arc.moment(1).abs() < 1e-15);
        let sc = reference_density(ReferenceDensity::Semicircle { center: 0.0, variance: 1.0 }, 4000).unwrap();
        assert_eq!(sc.points()[0], -sc.points()[3999]);
        assert!((sc.points()[0] + 2.0).abs() < 1e-3);
        assert!((sc.moment(2) - 1.0).abs() < 1e-3);
        assert!(sc.moment(1).abs() < 1e-15 && sc.moment(3).abs() < 1e-15);
        assert!((sc.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(reference_density(ReferenceDensity::Arcsine { a: 1.0, b: 1.0 }, 10).is_err());
        assert!(reference_density(ReferenceDensity::Semicircle { center: 0.0, variance: 0.0 }, 10).is_err());
    }

    #[test]
    fn chi_of_atoms_is_minus_infinity() {
        let m = DiscretizedMeasure::atoms(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(chi_one_var(&m), f64::NEG_INFINITY);
    }
}
