//! Seeded random Hermitian tuples: the Gaussian measure
//! `c_k exp(-(k/2) sum_j Tr A_j^2)` and the uniform measure on products of
//! operator-norm balls, plus the closed-form normalizations of both.
//!
//! Samples are addressed by index. Sample `i` under seed `s` is a pure
//! function of `(s, i)`, so any partition of an index range across workers
//! gives the same multiset of samples.

mod ball;
mod volume;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{CMatrix, HermitianMatrix, MatrixTuple};
use crate::rng::{keyed_rng, Stream};

pub use ball::{fekete_points, log_max_vandermonde_sq, log_vandermonde_sq, sample_unit_ball_eigenvalues, BALL_DIM_CAP};
pub use volume::{
    log_ball_volume, log_c_k, log_selberg, log_unit_ball_volume, log_vandermonde_integral,
    log_weyl_constant,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerKind {
    Gaussian,
    UniformBall { radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub dim: usize,
    pub arity: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub kind: SamplerKind,
}

impl SamplerConfig {
    pub fn gaussian(dim: usize, arity: usize, seed: u64) -> Result<Self> {
        let cfg = SamplerConfig { dim, arity, seed, kind: SamplerKind::Gaussian };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn uniform_ball(dim: usize, arity: usize, radius: f64, seed: u64) -> Result<Self> {
        let cfg = SamplerConfig { dim, arity, seed, kind: SamplerKind::UniformBall { radius } };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.arity == 0 {
            return Err(invalid("sampler dimension and arity must be at least 1"));
        }
        if let SamplerKind::UniformBall { radius } = self.kind {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(invalid(format!("ball radius must be positive, got {radius}")));
            }
            if self.dim > BALL_DIM_CAP {
                return Err(Error::Unsupported(format!(
                    "uniform ball sampling is capped at k = {BALL_DIM_CAP} (got k = {}); use Gaussian sampling for larger matrices",
                    self.dim
                )));
            }
        }
        Ok(())
    }

    /// Sample number `index`.
    pub fn sample(&self, index: u64) -> MatrixTuple {
        match self.kind {
            SamplerKind::Gaussian => {
                let mut rng = keyed_rng(self.seed, Stream::Gaussian, index);
                let comps = (0..self.arity).map(|_| gue_matrix(self.dim, &mut rng)).collect();
                MatrixTuple::new(comps).expect("components share a dimension")
            }
            SamplerKind::UniformBall { radius } => {
                let mut rng = keyed_rng(self.seed, Stream::Ball, index);
                let comps = (0..self.arity).map(|_| ball_matrix(self.dim, radius, &mut rng)).collect();
                MatrixTuple::new(comps).expect("components share a dimension")
            }
        }
    }

    /// Samples `start..start+count`, in index order.
    pub fn samples(&self, start: u64, count: u64) -> impl Iterator<Item = MatrixTuple> + '_ {
        (start..start + count).map(move |i| self.sample(i))
    }

    /// Parallel map over sample indices `0..count`; results are in index
    /// order regardless of the thread pool size.
    pub fn par_map<T, F>(&self, count: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, MatrixTuple) -> T + Sync + Send,
    {
        (0..count).into_par_iter().map(|i| f(i, self.sample(i))).collect()
    }
}

/// `count` Gaussian samples, indices `0..count`.
pub fn sample_gue(cfg: &SamplerConfig, count: u64) -> Result<impl Iterator<Item = MatrixTuple> + '_> {
    cfg.validate()?;
    if cfg.kind != SamplerKind::Gaussian {
        return Err(invalid("sample_gue requires a Gaussian sampler configuration"));
    }
    Ok(cfg.samples(0, count))
}

/// `count` uniform ball samples, indices `0..count`.
pub fn sample_ball(cfg: &SamplerConfig, count: u64) -> Result<impl Iterator<Item = MatrixTuple> + '_> {
    cfg.validate()?;
    if !matches!(cfg.kind, SamplerKind::UniformBall { .. }) {
        return Err(invalid("sample_ball requires a uniform_ball sampler configuration"));
    }
    Ok(cfg.samples(0, count))
}

/// GUE matrix with density proportional to `exp(-(k/2) Tr A^2)`: diagonal
/// entries have variance `1/k`, real and imaginary parts of off-diagonal
/// entries variance `1/(2k)`.
pub fn gue_matrix<R: Rng + ?Sized>(k: usize, rng: &mut R) -> HermitianMatrix {
    let sd_diag = (1.0 / k as f64).sqrt();
    let sd_off = (0.5 / k as f64).sqrt();
    let mut m = CMatrix::zeros(k);
    for i in 0..k {
        let d: f64 = rng.sample(StandardNormal);
        m.set(i, i, Complex64::new(d * sd_diag, 0.0));
        for j in (i + 1)..k {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(re * sd_off, im * sd_off);
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    HermitianMatrix::symmetrize(m)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix by modified
/// Gram-Schmidt. Gram-Schmidt yields a positive real diagonal in `R`, which
/// is the phase normalization that makes `Q` exactly Haar.
pub fn haar_unitary<R: Rng + ?Sized>(k: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..k)
        .map(|_| {
            (0..k)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect();
    for j in 0..k {
        for i in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let qi = &done[i];
            let proj: Complex64 = qi.iter().zip(&rest[0]).map(|(q, v)| q.conj() * v).sum();
            for (v, q) in rest[0].iter_mut().zip(qi) {
                *v -= proj * q;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    CMatrix::from_fn(k, |i, j| cols[j][i])
}

/// Uniform element of the operator-norm ball `B(k, radius)`.
pub fn ball_matrix<R: Rng + ?Sized>(k: usize, radius: f64, rng: &mut R) -> HermitianMatrix {
    let (lambda, _) = sample_unit_ball_eigenvalues(k, rng);
    let scaled: Vec<f64> = lambda.iter().map(|l| l * radius).collect();
    if k == 1 {
        return HermitianMatrix::diag(&scaled);
    }
    let u = haar_unitary(k, rng);
    let m = HermitianMatrix::from_spectrum(&scaled, &u);
    // U diag U* can overshoot the radius by rounding.
    if m.opnorm() > radius {
        m.scale(radius / m.opnorm())
    } else {
        m
    }
}
