//! Dense Hermitian linear algebra: construction, validation,
//! eigendecomposition, norms, traces and the two metrics on matrix tuples.

pub mod eigen;
mod hermitian;
mod matrix;
mod tuple;

pub use hermitian::{Eigh, HermitianMatrix, HERMITIAN_TOLERANCE};
pub use matrix::CMatrix;
pub use tuple::{hs_metric, uniform_metric, MatrixTuple};

/// Eigenvalues of `m` in nondecreasing order.
pub fn eigenvalues(m: &HermitianMatrix) -> Vec<f64> {
    m.eigenvalues()
}

/// Operator norm of a Hermitian matrix.
pub fn opnorm(m: &HermitianMatrix) -> f64 {
    m.opnorm()
}

/// `k^{-1} Tr(m)`.
pub fn normalized_trace(m: &HermitianMatrix) -> f64 {
    m.normalized_trace()
}

/// Largest singular value of a general square matrix, computed as the square
/// root of the top eigenvalue of `m* m`.
pub fn singular_norm(m: &CMatrix) -> f64 {
    let gram = HermitianMatrix::symmetrize(&m.adjoint() * m);
    gram.opnorm().max(0.0).sqrt()
}
