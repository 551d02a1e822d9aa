//! Microstate sets as membership predicates.
//!
//! A [`MicrostateSpec`] fixes polynomials `P_1..P_r` in `n + m` indeterminates
//! (`n` main variables followed by `m` variables "in the presence of"), the
//! reference norms `||P_j(a, b)||`, a tolerance `eps` and a matrix size `k`.
//! A tuple of `k x k` Hermitian matrices is a norm-microstate when every
//! polynomial norm is within `eps` of its reference value, and a
//! semi-microstate when it exceeds the reference value by at most `eps`.

mod trace;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::MatrixTuple;
use crate::ncpoly::NCPolynomial;

pub use trace::{
    all_words, is_trace_microstate, moment_map, trace_moment, tracestate_metric, truncation_tail_bound,
    MomentMap, TraceSpec, DEFAULT_METRIC_DEGREE,
};

/// One norm constraint: `P` together with its reference norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub poly: NCPolynomial,
    pub target: f64,
}

impl Constraint {
    pub fn new(poly: NCPolynomial, target: f64) -> Result<Self> {
        if !(target.is_finite() && target >= 0.0) {
            return Err(invalid(format!("target norm must be finite and nonnegative, got {target}")));
        }
        Ok(Constraint { poly, target })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MicrostateSpec {
    n: usize,
    m: usize,
    k: usize,
    epsilon: f64,
    radius_bound: f64,
    constraints: Vec<Constraint>,
}

impl MicrostateSpec {
    pub fn new(
        n: usize,
        m: usize,
        k: usize,
        epsilon: f64,
        radius_bound: f64,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(invalid("at least one main variable is required"));
        }
        if k == 0 {
            return Err(invalid("matrix size k must be at least 1"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(radius_bound > 0.0 && radius_bound.is_finite()) {
            return Err(invalid(format!("radius bound M must be positive, got {radius_bound}")));
        }
        for c in &constraints {
            if c.poly.arity() != n + m {
                return Err(Error::ArityMismatch { expected: n + m, got: c.poly.arity() });
            }
            if !(c.target.is_finite() && c.target >= 0.0) {
                return Err(invalid("target norms must be finite and nonnegative"));
            }
        }
        Ok(MicrostateSpec { n, m, k, epsilon, radius_bound, constraints })
    }

    /// Standard form: the first `n + m` constraints are the coordinate
    /// polynomials with the given reference norms, followed by `extra`.
    /// The uniform bound is `M = max coordinate target + 2 eps`.
    pub fn standard(
        n: usize,
        m: usize,
        k: usize,
        epsilon: f64,
        coordinate_targets: &[f64],
        extra: Vec<Constraint>,
    ) -> Result<Self> {
        if coordinate_targets.len() != n + m {
            return Err(Error::ArityMismatch { expected: n + m, got: coordinate_targets.len() });
        }
        let mut constraints = Vec::with_capacity(n + m + extra.len());
        for (j, &t) in coordinate_targets.iter().enumerate() {
            constraints.push(Constraint::new(NCPolynomial::coordinate(n + m, j)?, t)?);
        }
        constraints.extend(extra);
        let radius = coordinate_targets.iter().copied().fold(0.0, f64::max) + 2.0 * epsilon;
        Self::new(n, m, k, epsilon, radius, constraints)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn arity(&self) -> usize {
        self.n + self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn radius_bound(&self) -> f64 {
        self.radius_bound
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Same constraints at another matrix size.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("matrix size k must be at least 1"));
        }
        Ok(MicrostateSpec { k, ..self.clone() })
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.n, self.m, self.k, epsilon, self.radius_bound, self.constraints.clone())
    }

    /// Radius of a uniform-norm ball on variable `j` implied by the
    /// constraints: the smallest `(target + eps)/|c|` over constraints equal to
    /// `c X_j`. `None` when no constraint bounds that variable.
    pub fn coordinate_bound(&self, j: usize) -> Option<f64> {
        self.constraints
            .iter()
            .filter_map(|c| {
                let mut terms = c.poly.terms();
                let (w, coef) = terms.next()?;
                if terms.next().is_some() || w.as_slice() != [j] || coef.norm() == 0.0 {
                    return None;
                }
                Some((c.target + self.epsilon) / coef.norm())
            })
            .reduce(f64::min)
    }

    /// Radius `R` such that every microstate lies in `B(k, R)^n` (main
    /// variables only); `None` when some main variable is unconstrained.
    pub fn containing_radius(&self) -> Option<f64> {
        (0..self.n).map(|j| self.coordinate_bound(j)).try_fold(0.0, |acc, b| b.map(|b| f64::max(acc, b)))
    }

    fn check_tuple(&self, t: &MatrixTuple) -> Result<()> {
        if t.arity() != self.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), got: t.arity() });
        }
        if t.dim() != self.k {
            return Err(Error::DimensionMismatch { left: self.k, right: t.dim() });
        }
        Ok(())
    }

    /// `||P_j(t)||` for every constraint, in order.
    pub fn norms_at(&self, t: &MatrixTuple) -> Result<Vec<f64>> {
        self.check_tuple(t)?;
        self.constraints.iter().map(|c| c.poly.norm_at(t)).collect()
    }

    pub fn is_microstate(&self, t: &MatrixTuple) -> Result<bool> {
        self.check_tuple(t)?;
        for c in &self.constraints {
            if (c.poly.norm_at(t)? - c.target).abs() > self.epsilon {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_semi_microstate(&self, t: &MatrixTuple) -> Result<bool> {
        self.check_tuple(t)?;
        for c in &self.constraints {
            if c.poly.norm_at(t)? > c.target + self.epsilon {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Spec for the orthogonal sum of two reference tuples: same
    /// polynomials, targets the componentwise maxima, size `k1 + k2`.
    pub fn direct_sum(&self, other: &MicrostateSpec) -> Result<MicrostateSpec> {
        if self.n != other.n || self.m != other.m || self.constraints.len() != other.constraints.len() {
            return Err(invalid("direct sum of specs requires matching variables and constraint lists"));
        }
        let mut constraints = Vec::with_capacity(self.constraints.len());
        for (a, b) in self.constraints.iter().zip(&other.constraints) {
            if a.poly != b.poly {
                return Err(invalid("direct sum of specs requires identical polynomials"));
            }
            constraints.push(Constraint { poly: a.poly.clone(), target: a.target.max(b.target) });
        }
        MicrostateSpec::new(
            self.n,
            self.m,
            self.k + other.k,
            self.epsilon.max(other.epsilon),
            self.radius_bound.max(other.radius_bound),
            constraints,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SpecJson::from(self)).expect("spec serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SpecJson = serde_json::from_str(text).map_err(|e| invalid(format!("spec JSON: {e}")))?;
        raw.try_into()
    }
}

/// Wire form: `{n, m, k, epsilon, M, constraints: [{poly, target}]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    n: usize,
    #[serde(default)]
    m: usize,
    k: usize,
    epsilon: f64,
    #[serde(rename = "M")]
    radius_bound: f64,
    constraints: Vec<ConstraintJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintJson {
    poly: String,
    target: f64,
}

impl From<&MicrostateSpec> for SpecJson {
    fn from(s: &MicrostateSpec) -> Self {
        SpecJson {
            n: s.n,
            m: s.m,
            k: s.k,
            epsilon: s.epsilon,
            radius_bound: s.radius_bound,
            constraints: s
                .constraints
                .iter()
                .map(|c| ConstraintJson { poly: c.poly.to_string(), target: c.target })
                .collect(),
        }
    }
}

impl TryFrom<SpecJson> for MicrostateSpec {
    type Error = Error;
    fn try_from(raw: SpecJson) -> Result<Self> {
        let arity = raw.n + raw.m;
        let constraints = raw
            .constraints
            .iter()
            .map(|c| Constraint::new(NCPolynomial::parse(&c.poly, arity)?, c.target))
            .collect::<Result<Vec<_>>>()?;
        MicrostateSpec::new(raw.n, raw.m, raw.k, raw.epsilon, raw.radius_bound, constraints)
    }
}

impl Serialize for MicrostateSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MicrostateSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SpecJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

pub fn is_microstate(spec: &MicrostateSpec, t: &MatrixTuple) -> Result<bool> {
    spec.is_microstate(t)
}

pub fn is_semi_microstate(spec: &MicrostateSpec, t: &MatrixTuple) -> Result<bool> {
    spec.is_semi_microstate(t)
}

/// Drop the variables "in the presence of": keep the first `n` components.
pub fn project_presence(t: &MatrixTuple, n: usize) -> Result<MatrixTuple> {
    t.project(n)
}

/// Componentwise orthogonal sum.
pub fn direct_sum(t1: &MatrixTuple, t2: &MatrixTuple) -> Result<MatrixTuple> {
    t1.direct_sum(t2)
}
