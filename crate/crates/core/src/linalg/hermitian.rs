use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::eigen;
use super::CMatrix;
use crate::error::{invalid, Error, Result};

/// Entrywise self-adjointness tolerance, relative to `1 + max|a_ij|`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Above this size eigenvalues-only requests use the tridiagonal QL route.
const JACOBI_VALUES_CUTOFF: usize = 64;

/// Dense self-adjoint `k x k` matrix.
///
/// Construction symmetrizes the input as `(M + M*)/2` after checking that the
/// residual is within [`HERMITIAN_TOLERANCE`]; larger residuals are rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: CMatrix,
}

/// Eigendecomposition `M = U diag(values) U*`.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.dim() == 0 {
            return Err(invalid("matrix dimension must be at least 1"));
        }
        let residual = m.hermitian_residual();
        let tolerance = HERMITIAN_TOLERANCE * (1.0 + m.max_abs());
        if residual > tolerance {
            return Err(Error::NotHermitian { residual, tolerance });
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrize without checking. Callers guarantee the input is
    /// self-adjoint up to rounding.
    pub(crate) fn symmetrize(m: CMatrix) -> Self {
        let n = m.dim();
        let mut out = m;
        for i in 0..n {
            let d = out.get(i, i);
            out.set(i, i, Complex64::new(d.re, 0.0));
            for j in (i + 1)..n {
                let z = (out.get(i, j) + out.get(j, i).conj()) * 0.5;
                out.set(i, j, z);
                out.set(j, i, z.conj());
            }
        }
        HermitianMatrix { inner: out }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::BadShape { len: row.len() * dim, expected: dim * dim, dim });
            }
            data.extend_from_slice(row);
        }
        Self::new(CMatrix::from_vec(dim, data)?)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix { inner: CMatrix::identity(dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix { inner: CMatrix::zeros(dim) }
    }

    pub fn diag(values: &[f64]) -> Self {
        HermitianMatrix { inner: CMatrix::from_diag(values) }
    }

    /// `U diag(values) U*` for a unitary `U`.
    pub fn from_spectrum(values: &[f64], unitary: &CMatrix) -> Self {
        let n = values.len();
        let scaled = CMatrix::from_fn(n, |i, j| unitary.get(i, j) * values[j]);
        Self::symmetrize(&scaled * &unitary.adjoint())
    }

    /// Parse the row-major JSON literal `[[[re, im], ...], ...]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let rows: Vec<Vec<[f64; 2]>> =
            serde_json::from_str(text).map_err(|e| invalid(format!("matrix literal: {e}")))?;
        Self::from_pairs(&rows)
    }

    fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).map(|z| [z.re, z.im]).collect())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_pairs()).expect("matrix serialization")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner.get(i, j)
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> CMatrix {
        self.inner
    }

    /// Eigenvalues in nondecreasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self.dim() {
            1 => vec![self.inner.get(0, 0).re],
            2 => {
                let a = self.inner.get(0, 0).re;
                let d = self.inner.get(1, 1).re;
                let b = self.inner.get(0, 1).norm();
                let mid = 0.5 * (a + d);
                let rad = (0.5 * (a - d)).hypot(b);
                vec![mid - rad, mid + rad]
            }
            k if k <= JACOBI_VALUES_CUTOFF => eigen::jacobi(&self.inner, false).0,
            _ => eigen::tridiagonal_eigenvalues(&self.inner),
        }
    }

    /// Full eigendecomposition by cyclic Jacobi rotations.
    pub fn eigh(&self) -> Eigh {
        let (values, vectors) = eigen::jacobi(&self.inner, true);
        Eigh { values, vectors: vectors.expect("vectors requested") }
    }

    /// Operator norm: the largest eigenvalue modulus.
    pub fn opnorm(&self) -> f64 {
        let ev = self.eigenvalues();
        ev.first().unwrap().abs().max(ev.last().unwrap().abs())
    }

    /// `k^{-1} Tr`.
    pub fn normalized_trace(&self) -> f64 {
        let t = self.inner.trace();
        debug_assert!(t.im.abs() <= 1e-12 * (1.0 + t.re.abs()));
        t.re / self.dim() as f64
    }

    /// `Tr(M^2)`, the squared Hilbert-Schmidt norm.
    pub fn trace_square(&self) -> f64 {
        self.inner.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn direct_sum(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { inner: self.inner.direct_sum(&other.inner) }
    }

    /// `U M U*`.
    pub fn conjugate_by(&self, unitary: &CMatrix) -> HermitianMatrix {
        Self::symmetrize(&(unitary * &self.inner) * &unitary.adjoint())
    }

    pub fn scale(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix { inner: self.inner.scale(Complex64::new(s, 0.0)) }
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { inner: &self.inner + &other.inner }
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { inner: &self.inner - &other.inner }
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        HermitianMatrix::from_pairs(&rows).map_err(serde::de::Error::custom)
    }
}
