//! Trace-moment microstates and the weak-topology metric on trace-states.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{CMatrix, MatrixTuple};
use crate::ncpoly::Word;

/// Default truncation degree for [`tracestate_metric`].
pub const DEFAULT_METRIC_DEGREE: usize = 20;

/// Values of a trace-state on words. Traces of non-palindromic words can be
/// complex, so values are complex.
pub type MomentMap = BTreeMap<Word, Complex64>;

#[derive(Clone, Debug, PartialEq)]
pub struct TraceSpec {
    moments: BTreeMap<Word, f64>,
    tolerance: f64,
    degree_cap: usize,
    radius: f64,
}

impl TraceSpec {
    pub fn new(moments: BTreeMap<Word, f64>, tolerance: f64, degree_cap: usize, radius: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(invalid("trace tolerance must be positive"));
        }
        if !(radius > 0.0) {
            return Err(invalid("trace radius M must be positive"));
        }
        for (w, &v) in &moments {
            if w.len() > degree_cap {
                return Err(invalid(format!("word {w:?} longer than degree cap {degree_cap}")));
            }
            if v.abs() > radius.powi(w.len() as i32) * (1.0 + 1e-12) {
                return Err(invalid(format!("moment {v} of {w:?} exceeds M^len")));
            }
        }
        Ok(TraceSpec { moments, tolerance, degree_cap, radius })
    }

    /// Semicircle moments of one variable: `0, 1, 0, 2, 0, 5, ...`
    /// (Catalan numbers at even degrees) up to `degree`.
    pub fn semicircle(degree: usize, tolerance: f64, radius: f64) -> Result<Self> {
        let mut moments = BTreeMap::new();
        let mut catalan = 1.0f64;
        for p in 1..=degree {
            let v = if p % 2 == 1 {
                0.0
            } else {
                let h = (p / 2) as f64;
                catalan *= 2.0 * (2.0 * h - 1.0) / (h + 1.0);
                catalan
            };
            moments.insert(vec![0; p], v);
        }
        Self::new(moments, tolerance, degree, radius)
    }

    pub fn moments(&self) -> &BTreeMap<Word, f64> {
        &self.moments
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Membership in the trace-microstate set: every component norm is at most
/// `M` and every prescribed moment is matched within the tolerance.
pub fn is_trace_microstate(ts: &TraceSpec, t: &MatrixTuple) -> Result<bool> {
    if let Some(bad) = ts.moments.keys().flatten().find(|&&i| i >= t.arity()) {
        return Err(Error::IndexOutOfRange { index: bad + 1, arity: t.arity() });
    }
    if t.max_opnorm() > ts.radius {
        return Ok(false);
    }
    let words: Vec<&Word> = ts.moments.keys().collect();
    let values = trace_moments(t, &words);
    Ok(words
        .iter()
        .zip(values)
        .all(|(w, v)| (v - Complex64::new(ts.moments[*w], 0.0)).norm() <= ts.tolerance))
}

/// `k^{-1} Tr` of the product along `word`.
pub fn trace_moment(t: &MatrixTuple, word: &[usize]) -> Complex64 {
    trace_moments(t, &[&word.to_vec()])[0]
}

/// Normalized traces of several words, sharing prefix products when the
/// words are sorted.
fn trace_moments(t: &MatrixTuple, words: &[&Word]) -> Vec<Complex64> {
    let k = t.dim();
    let mut stack: Vec<CMatrix> = vec![CMatrix::identity(k)];
    let mut prev: &[usize] = &[];
    let mut out = Vec::with_capacity(words.len());
    for w in words {
        let common = prev.iter().zip(w.iter()).take_while(|(a, b)| a == b).count();
        stack.truncate(common + 1);
        for &letter in &w[common..] {
            let next = stack.last().unwrap().matmul(t.component(letter).as_matrix());
            stack.push(next);
        }
        out.push(stack.last().unwrap().trace() / k as f64);
        prev = w;
    }
    out
}

/// All words of length `1..=max_len` over `arity` letters, lexicographic.
pub fn all_words(arity: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut frontier: Vec<Word> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * arity);
        for w in &frontier {
            for a in 0..arity {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    out
}

/// The trace-state `k^{-1} Tr` of a matrix tuple on all words up to `max_len`.
pub fn moment_map(t: &MatrixTuple, max_len: usize) -> MomentMap {
    let words = all_words(t.arity(), max_len);
    let refs: Vec<&Word> = words.iter().collect();
    let vals = trace_moments(t, &refs);
    words.into_iter().zip(vals).collect()
}

/// `d(tau_1, tau_2) = sum_{p=1}^{P} sum_{|w| = p} (2 M arity)^{-p} |(tau_1 - tau_2)(w)|`.
pub fn tracestate_metric(
    mom1: &MomentMap,
    mom2: &MomentMap,
    radius: f64,
    arity: usize,
    max_degree: usize,
) -> Result<f64> {
    if !(radius > 0.0) || arity == 0 {
        return Err(invalid("metric needs M > 0 and arity >= 1"));
    }
    let base = 2.0 * radius * arity as f64;
    let mut total = 0.0;
    for w in all_words(arity, max_degree) {
        let a = mom1.get(&w).ok_or_else(|| Error::IncompleteMoments { word: w.clone() })?;
        let b = mom2.get(&w).ok_or_else(|| Error::IncompleteMoments { word: w.clone() })?;
        total += (a - b).norm() * base.powi(-(w.len() as i32));
    }
    Ok(total)
}

/// Bound on the part of the metric beyond degree `max_degree` when all
/// moments of length `p` are bounded by `M^p`: `2^{1 - max_degree}`.
pub fn truncation_tail_bound(max_degree: usize) -> f64 {
    2f64.powi(1 - max_degree as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HermitianMatrix;

    #[test]
    fn scalar_fails_first_moment() {
        let mut m = BTreeMap::new();
        m.insert(vec![0], 0.0);
        m.insert(vec![0, 0], 1.0);
        let ts = TraceSpec::new(m, 0.05, 2, 2.0).unwrap();
        assert!(!is_trace_microstate(&ts, &MatrixTuple::scalars(&[1.0])).unwrap());
        let t = MatrixTuple::single(HermitianMatrix::diag(&[1.0, -1.0]));
        assert!(is_trace_microstate(&ts, &t).unwrap());
    }

    #[test]
    fn radius_is_enforced() {
        let ts = TraceSpec::semicircle(2, 10.0, 1.5).unwrap();
        let t = MatrixTuple::single(HermitianMatrix::diag(&[2.0, -2.0]));
        assert!(!is_trace_microstate(&ts, &t).unwrap());
    }

    #[test]
    fn semicircle_moments() {
        let ts = TraceSpec::semicircle(8, 0.1, 2.0).unwrap();
        let vals: Vec<f64> = (1..=8).map(|p| ts.moments()[&vec![0; p]]).collect();
        assert_eq!(vals, vec![0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0]);
    }

    #[test]
    fn word_enumeration() {
        assert_eq!(all_words(2, 2), vec![vec![0], vec![0, 0], vec![0, 1], vec![1], vec![1, 0], vec![1, 1]]);
        assert_eq!(all_words(3, 4).len(), 3 + 9 + 27 + 81);
    }

    #[test]
    fn metric_examples() {
        let a = moment_map(&MatrixTuple::scalars(&[0.3]), 5);
        assert_eq!(tracestate_metric(&a, &a, 1.0, 1, 5).unwrap(), 0.0);

        let mut b = a.clone();
        *b.get_mut(&vec![0]).unwrap() += Complex64::new(0.1, 0.0);
        let d = tracestate_metric(&a, &b, 1.0, 1, 5).unwrap();
        assert!((d - 0.05).abs() < 1e-15);

        let mut c = a.clone();
        c.remove(&vec![0, 0, 0]);
        assert!(matches!(tracestate_metric(&a, &c, 1.0, 1, 5), Err(Error::IncompleteMoments { .. })));
    }

    #[test]
    fn trace_moment_of_commutator_product() {
        let a = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let b = HermitianMatrix::diag(&[1.0, -1.0]);
        let t = MatrixTuple::new(vec![a, b]).unwrap();
        assert_eq!(trace_moment(&t, &[0, 1]), Complex64::new(0.0, 0.0));
        assert_eq!(trace_moment(&t, &[0, 0]), Complex64::new(1.0, 0.0));
    }
}
