#![allow(dead_code)]

use freecap::linalg::{CMatrix, HermitianMatrix, MatrixTuple};
use freecap::ncpoly::{NCPolynomial, Word};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_hermitian(k: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let mut m = CMatrix::zeros(k);
    for i in 0..k {
        m.set(i, i, Complex64::new(rng.random_range(-1.0..1.0), 0.0));
        for j in (i + 1)..k {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    HermitianMatrix::new(m).unwrap()
}

pub fn random_tuple(n: usize, k: usize, rng: &mut ChaCha8Rng) -> MatrixTuple {
    MatrixTuple::new((0..n).map(|_| random_hermitian(k, rng)).collect()).unwrap()
}

/// Random polynomial with up to `terms` words of length at most `max_len`.
pub fn random_poly(arity: usize, terms: usize, max_len: usize, rng: &mut ChaCha8Rng) -> NCPolynomial {
    let items: Vec<(Word, Complex64)> = (0..terms)
        .map(|_| {
            let len = rng.random_range(0..=max_len);
            let w = (0..len).map(|_| rng.random_range(0..arity)).collect();
            (w, Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
        })
        .collect();
    NCPolynomial::from_terms(arity, items).unwrap()
}
