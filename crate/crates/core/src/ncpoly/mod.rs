//! Noncommutative polynomials in self-adjoint indeterminates `X1..Xn`.
//!
//! A polynomial is a finite map from words (sequences of indeterminate
//! indices) to complex coefficients. Words are stored 0-based; the text form
//! uses 1-based names `X1, X2, ...`.

mod parse;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{singular_norm, CMatrix, HermitianMatrix, MatrixTuple};

/// Maximum degree accepted from text input.
pub const DEGREE_CAP: usize = 32;

/// A word in the indeterminates, 0-based. The empty word is the unit.
pub type Word = Vec<usize>;

#[derive(Clone, Debug, PartialEq)]
pub struct NCPolynomial {
    arity: usize,
    terms: BTreeMap<Word, Complex64>,
}

impl NCPolynomial {
    /// Canonicalize a list of terms: merge repeated words, drop zero
    /// coefficients, validate indices and the degree cap.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Word, Complex64)>) -> Result<Self> {
        let mut map: BTreeMap<Word, Complex64> = BTreeMap::new();
        for (w, c) in terms {
            if let Some(&bad) = w.iter().find(|&&i| i >= arity) {
                return Err(Error::IndexOutOfRange { index: bad + 1, arity });
            }
            if w.len() > DEGREE_CAP {
                return Err(Error::DegreeTooLarge { degree: w.len(), cap: DEGREE_CAP });
            }
            *map.entry(w).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(NCPolynomial { arity, terms: map })
    }

    pub fn parse(text: &str, arity: usize) -> Result<Self> {
        parse::parse(text, arity)
    }

    pub fn zero(arity: usize) -> Self {
        NCPolynomial { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: Complex64) -> Self {
        Self::from_terms(arity, [(Word::new(), c)]).expect("constant is always valid")
    }

    /// The coordinate polynomial `X_{index+1}`.
    pub fn coordinate(arity: usize, index: usize) -> Result<Self> {
        Self::from_terms(arity, [(vec![index], Complex64::new(1.0, 0.0))])
    }

    /// Real linear form `sum_j c_j X_j`.
    pub fn linear(coefficients: &[f64]) -> Self {
        let arity = coefficients.len();
        Self::from_terms(
            arity,
            coefficients.iter().enumerate().map(|(j, &c)| (vec![j], Complex64::new(c, 0.0))),
        )
        .expect("linear form is always valid")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &[usize]) -> Complex64 {
        self.terms.get(w).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Reverse every word and conjugate every coefficient.
    pub fn adjoint(&self) -> Self {
        NCPolynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.iter().rev().copied().collect(), c.conj()))
                .collect(),
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }

    /// True when every term has degree one and a real coefficient.
    pub fn real_linear_coefficients(&self) -> Option<Vec<f64>> {
        let mut out = vec![0.0; self.arity];
        for (w, c) in &self.terms {
            if w.len() != 1 || c.im != 0.0 {
                return None;
            }
            out[w[0]] = c.re;
        }
        Some(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.arity, self.terms.iter().map(|(w, &a)| (w.clone(), a * c)))
            .expect("scaling preserves validity")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other.arity)?;
        Self::from_terms(
            self.arity,
            self.terms.iter().chain(other.terms.iter()).map(|(w, &c)| (w.clone(), c)),
        )
    }

    /// Product: concatenation of words, bilinear in coefficients.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other.arity)?;
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                terms.push((w, c1 * c2));
            }
        }
        Self::from_terms(self.arity, terms)
    }

    fn check_arity(&self, arity: usize) -> Result<()> {
        if self.arity != arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: arity });
        }
        Ok(())
    }

    /// Evaluate at a tuple of matrices. The empty word maps to the identity.
    ///
    /// Words are visited in lexicographic order and products of shared
    /// prefixes are reused, so the cost is one matrix product per trie edge.
    pub fn eval(&self, t: &MatrixTuple) -> Result<CMatrix> {
        self.check_arity(t.arity())?;
        let k = t.dim();
        let mut out = CMatrix::zeros(k);
        // stack[i] = product of the first i letters of the previous word.
        let mut stack: Vec<CMatrix> = vec![CMatrix::identity(k)];
        let mut prev: &[usize] = &[];
        for (w, &c) in &self.terms {
            let common = prev.iter().zip(w).take_while(|(a, b)| a == b).count();
            stack.truncate(common + 1);
            for &letter in &w[common..] {
                let next = stack.last().unwrap().matmul(t.component(letter).as_matrix());
                stack.push(next);
            }
            out.axpy(c, stack.last().unwrap());
            prev = w;
        }
        Ok(out)
    }

    /// Operator norm of the value at `t`.
    ///
    /// Computed as `sqrt(||P(t)* P(t)||)`; when the value is Hermitian the
    /// eigenvalue route is used directly, which agrees to rounding.
    pub fn norm_at(&self, t: &MatrixTuple) -> Result<f64> {
        let v = self.eval(t)?;
        let scale = 1.0 + v.max_abs();
        if v.hermitian_residual() <= 1e-13 * scale {
            Ok(HermitianMatrix::symmetrize(v).opnorm())
        } else {
            Ok(singular_norm(&v))
        }
    }
}

impl fmt::Display for NCPolynomial {
    /// Canonical text: `(re,im)*X1*X2 + (re,im) + ...`; parses back to an
    /// identical polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "(0,0)");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({},{})", c.re, c.im)?;
            for &i in w {
                write!(f, "*X{}", i + 1)?;
            }
        }
        Ok(())
    }
}

/// Parse `text` as a polynomial in `arity` indeterminates.
pub fn parse_poly(text: &str, arity: usize) -> Result<NCPolynomial> {
    NCPolynomial::parse(text, arity)
}

pub fn eval_poly(p: &NCPolynomial, t: &MatrixTuple) -> Result<CMatrix> {
    p.eval(t)
}

pub fn adjoint_poly(p: &NCPolynomial) -> NCPolynomial {
    p.adjoint()
}

pub fn poly_norm_at(p: &NCPolynomial, t: &MatrixTuple) -> Result<f64> {
    p.norm_at(t)
}
