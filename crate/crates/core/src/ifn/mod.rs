//! Membership/nonmembership norm pairs on `R^d`.
//!
//! A pair `(mu, nu)` grades how strongly a vector `x` counts as small at scale
//! `t`. The standard pair induced by a norm is `mu(x,t) = t/(t+|x|)` and
//! `nu(x,t) = |x|/(t+|x|)` for `t > 0`, with `(0, 1)` at `t <= 0`.

mod axioms;
pub mod perturbed;

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use axioms::{check_axioms, Axiom, AxiomCheck, AxiomReport, CheckMode, Witness};

/// A point of the ambient space `R^d`. Coordinates are always finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("vector must have at least one coordinate".into()));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite coordinate {bad}")));
        }
        Ok(Vector(coords))
    }

    pub fn scalar(value: f64) -> Result<Self> {
        Self::new(vec![value])
    }

    /// The zero vector of dimension `dim`.
    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Norm on `R^d` used to induce the standard pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormChoice {
    /// `|x|` on `R^1`.
    Absolute,
    Euclidean,
    Supremum,
}

impl NormChoice {
    pub fn norm(self, x: &[f64]) -> f64 {
        match self {
            NormChoice::Absolute => x[0].abs(),
            NormChoice::Euclidean => x.iter().map(|c| c * c).sum::<f64>().sqrt(),
            NormChoice::Supremum => x.iter().fold(0.0, |acc, c| acc.max(c.abs())),
        }
    }

    /// Whether `max_{y in S} |y - x|` is determined by the coordinatewise
    /// extremes of `S` (true for the absolute and supremum norms).
    pub fn is_coordinate_separable(self) -> bool {
        matches!(self, NormChoice::Absolute | NormChoice::Supremum)
    }

    pub fn name(self) -> &'static str {
        match self {
            NormChoice::Absolute => "absolute",
            NormChoice::Euclidean => "euclidean",
            NormChoice::Supremum => "supremum",
        }
    }
}

impl std::str::FromStr for NormChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" | "abs" => Ok(NormChoice::Absolute),
            "euclidean" | "l2" => Ok(NormChoice::Euclidean),
            "supremum" | "sup" | "max" => Ok(NormChoice::Supremum),
            other => Err(Error::InvalidParameter(format!("unknown norm `{other}`"))),
        }
    }
}

type Grade = dyn Fn(&[f64], f64) -> f64 + Send + Sync;

/// Description of a pair whose grades depend on `x` only through a norm.
///
/// `grades(r, t)` returns `(mu, nu)` for `|x| = r`; mu must be
/// non-increasing and nu non-decreasing in `r`. Estimators use this to
/// replace scans over vectors with scans over norms.
#[derive(Clone, Copy)]
pub struct NormProfile {
    pub norm: NormChoice,
    pub grades: fn(f64, f64) -> (f64, f64),
}

impl fmt::Debug for NormProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NormProfile").field("norm", &self.norm).finish_non_exhaustive()
    }
}

/// An intuitionistic fuzzy norm candidate `(mu, nu)` on `R^dim`.
///
/// Immutable after construction; cheap to clone and safe to share across
/// threads.
#[derive(Clone)]
pub struct IFNormPair {
    tag: String,
    dim: usize,
    mu: Arc<Grade>,
    nu: Arc<Grade>,
    profile: Option<NormProfile>,
}

impl fmt::Debug for IFNormPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IFNormPair")
            .field("tag", &self.tag)
            .field("dim", &self.dim)
            .field("profile", &self.profile)
            .finish_non_exhaustive()
    }
}

impl IFNormPair {
    /// Builds a pair from arbitrary grade functions. Nothing is checked here;
    /// run [`check_axioms`] to find out whether the result is an IF-norm.
    pub fn new<M, N>(tag: impl Into<String>, dim: usize, mu: M, nu: N) -> Self
    where
        M: Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
        N: Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    {
        IFNormPair { tag: tag.into(), dim, mu: Arc::new(mu), nu: Arc::new(nu), profile: None }
    }

    /// Builds a pair whose grades are `grades(norm(x), t)`.
    pub fn from_profile(tag: impl Into<String>, dim: usize, profile: NormProfile) -> Self {
        let NormProfile { norm, grades } = profile;
        IFNormPair {
            tag: tag.into(),
            dim,
            mu: Arc::new(move |x, t| grades(norm.norm(x), t).0),
            nu: Arc::new(move |x, t| grades(norm.norm(x), t).1),
            profile: Some(profile),
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn profile(&self) -> Option<&NormProfile> {
        self.profile.as_ref()
    }

    #[inline]
    pub fn mu(&self, x: &[f64], t: f64) -> f64 {
        (self.mu)(x, t)
    }

    #[inline]
    pub fn nu(&self, x: &[f64], t: f64) -> f64 {
        (self.nu)(x, t)
    }

    #[inline]
    pub fn grades(&self, x: &[f64], t: f64) -> (f64, f64) {
        match &self.profile {
            Some(p) => (p.grades)(p.norm.norm(x), t),
            None => (self.mu(x, t), self.nu(x, t)),
        }
    }

    /// Checked evaluation: `t` and `x` must be finite and `x` must live in
    /// `R^dim`.
    pub fn evaluate(&self, x: &[f64], t: f64) -> Result<(f64, f64)> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("t must be finite, got {t}")));
        }
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: x.len() });
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("x must have finite coordinates".into()));
        }
        Ok(self.grades(x, t))
    }
}

/// Free-function form of [`IFNormPair::evaluate`].
pub fn evaluate(pair: &IFNormPair, x: &[f64], t: f64) -> Result<(f64, f64)> {
    pair.evaluate(x, t)
}

fn standard_grades(r: f64, t: f64) -> (f64, f64) {
    if t <= 0.0 {
        (0.0, 1.0)
    } else {
        (t / (t + r), r / (t + r))
    }
}

/// The pair induced by `norm` on `R^dim`:
/// `mu(x,t) = t/(t+|x|)`, `nu(x,t) = |x|/(t+|x|)` for `t > 0`.
pub fn standard_pair(norm: NormChoice, dim: usize) -> Result<IFNormPair> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if norm == NormChoice::Absolute && dim != 1 {
        return Err(Error::InvalidParameter(format!(
            "the absolute norm needs dimension 1, got {dim}"
        )));
    }
    Ok(IFNormPair::from_profile(
        format!("standard/{}/{dim}", norm.name()),
        dim,
        NormProfile { norm, grades: standard_grades },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs_pair() -> IFNormPair {
        standard_pair(NormChoice::Absolute, 1).unwrap()
    }

    #[test]
    fn standard_pair_values() {
        let pair = abs_pair();
        assert_eq!(pair.evaluate(&[1.0], 1.0).unwrap(), (0.5, 0.5));
        assert_eq!(pair.evaluate(&[-3.0], 1.0).unwrap(), (0.25, 0.75));
        assert_eq!(pair.evaluate(&[7.0], 0.0).unwrap(), (0.0, 1.0));
        assert_eq!(pair.evaluate(&[7.0], -2.5).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn zero_vector_is_fully_small() {
        let pair = abs_pair();
        assert_eq!(pair.evaluate(&[0.0], 0.001).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn limit_probes() {
        let pair = abs_pair();
        let (mu_hi, nu_hi) = pair.evaluate(&[1.0], 1e6).unwrap();
        assert!((mu_hi - 1.0).abs() < 1e-3 && nu_hi < 1e-3);
        let (mu_lo, nu_lo) = pair.evaluate(&[1.0], 1e-6).unwrap();
        assert!(mu_lo < 1e-3 && (nu_lo - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_arguments() {
        let pair = abs_pair();
        assert!(matches!(pair.evaluate(&[1.0], f64::NAN), Err(Error::InvalidParameter(_))));
        assert!(matches!(pair.evaluate(&[1.0], f64::INFINITY), Err(Error::InvalidParameter(_))));
        assert!(matches!(pair.evaluate(&[1.0, 2.0], 1.0), Err(Error::DimensionMismatch { .. })));
        assert!(standard_pair(NormChoice::Absolute, 3).is_err());
        assert!(Vector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn norms() {
        let x = [3.0, -4.0, 1.0];
        assert_eq!(NormChoice::Euclidean.norm(&x[..2]), 5.0);
        assert_eq!(NormChoice::Supremum.norm(&x), 4.0);
        assert_eq!(NormChoice::Absolute.norm(&[-2.0]), 2.0);
    }

    #[test]
    fn grades_sum_to_one() {
        let pair = standard_pair(NormChoice::Euclidean, 3).unwrap();
        for (x, t) in [([0.1, 2.0, -3.0], 0.7), ([1e3, 0.0, 5.0], 1e-3), ([1e-6, 1e-6, 0.0], 1e4)] {
            let (mu, nu) = pair.evaluate(&x, t).unwrap();
            assert!((mu + nu - 1.0).abs() <= 1e-14);
        }
    }
}
