use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::expr;
use crate::{Error, Result};

/// `divergence_warning` is raised when `P_M < DIVERGENCE_FACTOR * P_0`.
pub const DIVERGENCE_FACTOR: f64 = 10.0;

/// How far expression weights are probed to decide strict positivity.
const POSITIVITY_PROBE: usize = 1 << 12;

/// Nonnegative weights `p_j` with `p_0 > 0`.
#[derive(Clone)]
pub struct WeightSequence {
    descriptor: String,
    weight: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
    strictly_positive: bool,
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSequence")
            .field("descriptor", &self.descriptor)
            .field("strictly_positive", &self.strictly_positive)
            .finish_non_exhaustive()
    }
}

impl WeightSequence {
    /// `strictly_positive` is a promise that every `p_j > 0`; weighted
    /// difference transforms rely on it.
    pub fn from_fn<F>(descriptor: impl Into<String>, strictly_positive: bool, f: F) -> Result<Self>
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        let p0 = f(0);
        if !(p0 > 0.0 && p0.is_finite()) {
            return Err(Error::InvalidWeights(format!("p_0 must be positive, got {p0}")));
        }
        Ok(WeightSequence { descriptor: descriptor.into(), weight: Arc::new(f), strictly_positive })
    }

    /// `p_j = 1` (Cesaro weights).
    pub fn ones() -> Self {
        Self::from_fn("ones", true, |_| 1.0).unwrap()
    }

    /// `p_j = j + 1`.
    pub fn linear() -> Self {
        Self::from_fn("linear", true, |j| (j + 1) as f64).unwrap()
    }

    /// `p_j = 1/(j + 1)`.
    pub fn harmonic() -> Self {
        Self::from_fn("harmonic", true, |j| 1.0 / (j + 1) as f64).unwrap()
    }

    /// Finitely supported weights: `p_j = values[j]`, zero past the end.
    pub fn from_slice(values: &[f64]) -> Result<Self> {
        if let Some((j, &v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidWeights(format!("p_{j} = {v} is not a finite nonnegative number")));
        }
        let owned: Arc<[f64]> = values.into();
        let desc = format!("{values:?}");
        Self::from_fn(desc, false, move |j| owned.get(j).copied().unwrap_or(0.0))
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "ones" => Some(Self::ones()),
            "linear" => Some(Self::linear()),
            "harmonic" => Some(Self::harmonic()),
            _ => None,
        }
    }

    /// Builtin name, or an expression in the single index variable `var`.
    /// Strict positivity is inferred from the first `2^12` terms.
    pub fn from_text(text: &str, var: &str) -> Result<Self> {
        if let Some(w) = Self::builtin(text.trim()) {
            return Ok(w);
        }
        let compiled = expr::compile(text, &[var])?;
        if compiled.dim() != 1 {
            return Err(Error::InvalidWeights(format!("weights must be scalar, `{text}` has {} components", compiled.dim())));
        }
        let f = move |j: usize| compiled.eval_scalar(&[j as f64]).unwrap_or(f64::NAN);
        let positive = (0..=POSITIVITY_PROBE).all(|j| f(j) > 0.0);
        Self::from_fn(text.to_string(), positive, f)
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.strictly_positive
    }

    #[inline]
    pub fn weight(&self, j: usize) -> f64 {
        (self.weight)(j)
    }
}

/// `P_m = sum_{j<=m} p_j` for `m = 0..=M`, together with the weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulativeWeights {
    descriptor: String,
    weights: Vec<f64>,
    sums: Vec<f64>,
    divergence_warning: bool,
}

impl CumulativeWeights {
    pub fn horizon(&self) -> usize {
        self.sums.len() - 1
    }

    /// `P_m`. Panics past the horizon.
    #[inline]
    pub fn get(&self, m: usize) -> f64 {
        self.sums[m]
    }

    #[inline]
    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Heuristic flag that `P_m -> infinity` may fail.
    pub fn divergence_warning(&self) -> bool {
        self.divergence_warning
    }

    /// `P_b - P_a` with `P_{-1} = 0`, for `a` in `-1..=b`.
    #[inline]
    pub fn span(&self, a: isize, b: usize) -> f64 {
        if a < 0 {
            self.sums[b]
        } else {
            self.sums[b] - self.sums[a as usize]
        }
    }
}

/// Cumulative sums in ascending index order.
pub fn cumulative(p: &WeightSequence, horizon: usize) -> Result<CumulativeWeights> {
    let mut weights = Vec::with_capacity(horizon + 1);
    let mut sums = Vec::with_capacity(horizon + 1);
    let mut acc = 0.0;
    for j in 0..=horizon {
        let w = p.weight(j);
        if !(w >= 0.0 && w.is_finite()) || (j == 0 && w <= 0.0) {
            return Err(Error::InvalidWeights(format!("{}: p_{j} = {w}", p.descriptor())));
        }
        acc += w;
        weights.push(w);
        sums.push(acc);
    }
    let divergence_warning = sums[horizon] < DIVERGENCE_FACTOR * sums[0];
    Ok(CumulativeWeights { descriptor: p.descriptor().to_string(), weights, sums, divergence_warning })
}
