use serde::{Deserialize, Serialize};

use super::HermitianMatrix;
use crate::error::{invalid, Error, Result};

/// An ordered `n`-tuple of Hermitian matrices of a common size `k`: a point
/// of `(M_k^{sa})^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixTuple {
    components: Vec<HermitianMatrix>,
}

impl MatrixTuple {
    pub fn new(components: Vec<HermitianMatrix>) -> Result<Self> {
        let first = components.first().ok_or_else(|| invalid("tuple arity must be at least 1"))?;
        let k = first.dim();
        for c in &components[1..] {
            if c.dim() != k {
                return Err(Error::DimensionMismatch { left: k, right: c.dim() });
            }
        }
        Ok(MatrixTuple { components })
    }

    pub fn single(m: HermitianMatrix) -> Self {
        MatrixTuple { components: vec![m] }
    }

    pub fn zeros(arity: usize, dim: usize) -> Self {
        MatrixTuple { components: vec![HermitianMatrix::zeros(dim); arity] }
    }

    /// Scalar tuple (`k = 1`).
    pub fn scalars(values: &[f64]) -> Self {
        MatrixTuple { components: values.iter().map(|&x| HermitianMatrix::diag(&[x])).collect() }
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.components.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn components(&self) -> &[HermitianMatrix] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &HermitianMatrix {
        &self.components[j]
    }

    fn check_compatible(&self, other: &MatrixTuple) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), got: other.arity() });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }

    /// Componentwise block-diagonal sum; the result has size `k1 + k2`.
    pub fn direct_sum(&self, other: &MatrixTuple) -> Result<MatrixTuple> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), got: other.arity() });
        }
        Ok(MatrixTuple {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.direct_sum(b))
                .collect(),
        })
    }

    /// The first `n` components.
    pub fn project(&self, n: usize) -> Result<MatrixTuple> {
        if n == 0 || n > self.arity() {
            return Err(invalid(format!(
                "projection onto {n} components of a tuple of arity {}",
                self.arity()
            )));
        }
        Ok(MatrixTuple { components: self.components[..n].to_vec() })
    }

    /// `sum_j Tr(A_j^2)`.
    pub fn trace_square_sum(&self) -> f64 {
        self.components.iter().map(HermitianMatrix::trace_square).sum()
    }

    pub fn max_opnorm(&self) -> f64 {
        self.components.iter().map(HermitianMatrix::opnorm).fold(0.0, f64::max)
    }
}

impl<'de> Deserialize<'de> for MatrixTuple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let comps = Vec::<HermitianMatrix>::deserialize(d)?;
        MatrixTuple::new(comps).map_err(serde::de::Error::custom)
    }
}

/// Normalized Hilbert-Schmidt distance
/// `k^{-1/2} (sum_j Tr((A_j - B_j)^2))^{1/2}`.
pub fn hs_metric(t1: &MatrixTuple, t2: &MatrixTuple) -> Result<f64> {
    t1.check_compatible(t2)?;
    let s: f64 = t1
        .components
        .iter()
        .zip(&t2.components)
        .map(|(a, b)| {
            a.as_matrix()
                .as_slice()
                .iter()
                .zip(b.as_matrix().as_slice())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
        })
        .sum();
    Ok((s / t1.dim() as f64).sqrt())
}

/// Uniform-norm distance `max_j ||A_j - B_j||`.
pub fn uniform_metric(t1: &MatrixTuple, t2: &MatrixTuple) -> Result<f64> {
    t1.check_compatible(t2)?;
    Ok(t1
        .components
        .iter()
        .zip(&t2.components)
        .map(|(a, b)| a.sub(b).opnorm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_small_cases() {
        let t = MatrixTuple::scalars(&[3.0]);
        assert_eq!(hs_metric(&t, &t).unwrap(), 0.0);
        assert_eq!(uniform_metric(&t, &t).unwrap(), 0.0);
        assert_eq!(hs_metric(&t, &MatrixTuple::scalars(&[1.0])).unwrap(), 2.0);

        let id = MatrixTuple::single(HermitianMatrix::identity(2));
        let z = MatrixTuple::zeros(1, 2);
        assert!((hs_metric(&id, &z).unwrap() - 1.0).abs() < 1e-15);

        let a = MatrixTuple::scalars(&[1.0, 0.0]);
        let b = MatrixTuple::scalars(&[0.0, 2.0]);
        assert_eq!(uniform_metric(&a, &b).unwrap(), 2.0);
    }

    #[test]
    fn mismatches_are_errors() {
        let a = MatrixTuple::scalars(&[1.0, 0.0]);
        let b = MatrixTuple::scalars(&[0.0]);
        assert!(matches!(hs_metric(&a, &b), Err(Error::ArityMismatch { .. })));
        let c = MatrixTuple::zeros(2, 3);
        assert!(matches!(uniform_metric(&a, &c), Err(Error::DimensionMismatch { .. })));
        assert!(MatrixTuple::new(vec![]).is_err());
        assert!(
            MatrixTuple::new(vec![HermitianMatrix::zeros(1), HermitianMatrix::zeros(2)]).is_err()
        );
    }

    #[test]
    fn projection() {
        let t = MatrixTuple::scalars(&[1.0, 2.0, 3.0]);
        assert_eq!(t.project(2).unwrap(), MatrixTuple::scalars(&[1.0, 2.0]));
        assert_eq!(t.project(3).unwrap(), t);
        assert!(t.project(4).is_err());
        assert!(t.project(0).is_err());
    }
}
