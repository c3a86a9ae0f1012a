//! Weighted means `t^{αβ}` and the rectangle/strip means built on them.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::sequences::{CumulativeWeights, Lattice, PrefixTable};
use crate::{Error, Result, Vector};

/// Which indices are averaged: `(1,1)` both, `(1,0)` the first, `(0,1)` the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlphaBeta {
    OneOne,
    OneZero,
    ZeroOne,
}

impl AlphaBeta {
    pub const ALL: [AlphaBeta; 3] = [AlphaBeta::OneOne, AlphaBeta::OneZero, AlphaBeta::ZeroOne];

    pub fn pair(self) -> (u8, u8) {
        match self {
            AlphaBeta::OneOne => (1, 1),
            AlphaBeta::OneZero => (1, 0),
            AlphaBeta::ZeroOne => (0, 1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AlphaBeta::OneOne => "1,1",
            AlphaBeta::OneZero => "1,0",
            AlphaBeta::ZeroOne => "0,1",
        }
    }
}

impl fmt::Display for AlphaBeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.label())
    }
}

impl Serialize for AlphaBeta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl FromStr for AlphaBeta {
    type Err = Error;

    /// Accepts `11`, `1,1`, `(1,1)` and the like.
    fn from_str(s: &str) -> Result<Self> {
        let digits: String = s.chars().filter(|c| !matches!(c, '(' | ')' | ',' | ' ')).collect();
        match digits.as_str() {
            "11" => Ok(AlphaBeta::OneOne),
            "10" => Ok(AlphaBeta::OneZero),
            "01" => Ok(AlphaBeta::ZeroOne),
            _ => Err(Error::InvalidParameter(format!("unknown mean kind `{s}`; expected (1,1), (1,0) or (0,1)"))),
        }
    }
}

/// `t^{αβ}_{mn}` for all `(m, n)` in the horizon.
#[derive(Debug, Clone)]
pub struct MeanTable {
    alpha_beta: AlphaBeta,
    values: Lattice,
    p: String,
    q: String,
}

impl MeanTable {
    pub fn alpha_beta(&self) -> AlphaBeta {
        self.alpha_beta
    }

    pub fn values(&self) -> &Lattice {
        &self.values
    }

    pub fn horizon(&self) -> (usize, usize) {
        self.values.horizon()
    }

    #[inline]
    pub fn at(&self, m: usize, n: usize) -> &[f64] {
        self.values.at(m, n)
    }

    pub fn weights(&self) -> (&str, &str) {
        (&self.p, &self.q)
    }
}

fn check_cover(prefix: &PrefixTable, p: &CumulativeWeights, q: &CumulativeWeights) -> Result<()> {
    let (max_m, max_n) = prefix.horizon();
    if p.horizon() < max_m || q.horizon() < max_n {
        return Err(Error::OutOfRange { m: max_m, n: max_n, max_m: p.horizon(), max_n: q.horizon() });
    }
    Ok(())
}

/// Divides the matching prefix table by `P_m Q_n`, `P_m` or `Q_n`.
pub fn mean_table(
    prefix: &PrefixTable,
    p: &CumulativeWeights,
    q: &CumulativeWeights,
    alpha_beta: AlphaBeta,
) -> Result<MeanTable> {
    check_cover(prefix, p, q)?;
    let (max_m, max_n) = prefix.horizon();
    let dim = prefix.dim();
    let source = match alpha_beta {
        AlphaBeta::OneOne => prefix.double(),
        AlphaBeta::OneZero => prefix.row_prefix(),
        AlphaBeta::ZeroOne => prefix.col_prefix(),
    };
    let values = Lattice::from_fn(max_m, max_n, dim, |m, n, out| {
        let denom = match alpha_beta {
            AlphaBeta::OneOne => p.get(m) * q.get(n),
            AlphaBeta::OneZero => p.get(m),
            AlphaBeta::ZeroOne => q.get(n),
        };
        for (o, s) in out.iter_mut().zip(source.at(m, n)) {
            *o = s / denom;
        }
    });
    if let Some((m, n)) = values.first_non_finite() {
        return Err(Error::Evaluation { m, n, kind: crate::EvalFailure::NonFinite });
    }
    Ok(MeanTable { alpha_beta, values, p: p.descriptor().into(), q: q.descriptor().into() })
}

/// The four window means appearing in the Tauberian conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Mean of `x_{jk} - x_{mn}` over `(m, λ_m] x (n, λ_n]`, `λ > 1`.
    DoubleGt1,
    /// Mean of `x_{mn} - x_{jk}` over `(λ_m, m] x (λ_n, n]`, `0 < λ < 1`.
    DoubleLt1,
    /// Mean of `x_{jn} - x_{mn}` over `j ∈ (m, λ_m]`, `λ > 1`.
    Strip10Gt1,
    /// Mean of `x_{mn} - x_{jn}` over `j ∈ (λ_m, m]`, `0 < λ < 1`.
    Strip10Lt1,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::DoubleGt1, Variant::DoubleLt1, Variant::Strip10Gt1, Variant::Strip10Lt1];

    pub fn is_gt1(self) -> bool {
        matches!(self, Variant::DoubleGt1 | Variant::Strip10Gt1)
    }

    pub fn is_double(self) -> bool {
        matches!(self, Variant::DoubleGt1 | Variant::DoubleLt1)
    }

    /// The mean table the decomposition identity is written in.
    pub fn alpha_beta(self) -> AlphaBeta {
        if self.is_double() {
            AlphaBeta::OneOne
        } else {
            AlphaBeta::OneZero
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::DoubleGt1 => "double-gt1",
            Variant::DoubleLt1 => "double-lt1",
            Variant::Strip10Gt1 => "strip10-gt1",
            Variant::Strip10Lt1 => "strip10-lt1",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Variant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown window variant `{s}`")))
    }
}

/// `λ_m = floor(λ m)`.
#[inline]
pub fn dilate(lambda: f64, m: usize) -> usize {
    (lambda * m as f64).floor() as usize
}

/// A validated window `(m, n, λ_m, λ_n)` for one variant. For strip variants
/// `lambda_n == n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub variant: Variant,
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub lambda_m: usize,
    pub lambda_n: usize,
}

impl Window {
    /// Checks λ's range and that the window is nonempty and inside the
    /// `(max_m, max_n)` horizon.
    pub fn new(variant: Variant, m: usize, n: usize, lambda: f64, horizon: (usize, usize)) -> Result<Self> {
        let valid_lambda = if variant.is_gt1() { lambda > 1.0 } else { lambda > 0.0 && lambda < 1.0 };
        if !valid_lambda || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} is outside the range of {variant}")));
        }
        let lambda_m = dilate(lambda, m);
        let lambda_n = if variant.is_double() { dilate(lambda, n) } else { n };
        let nonempty = if variant.is_gt1() {
            lambda_m > m && (!variant.is_double() || lambda_n > n)
        } else {
            lambda_m < m && (!variant.is_double() || lambda_n < n)
        };
        if !nonempty {
            return Err(Error::DegenerateWindow { m, n, lambda });
        }
        let (top_m, top_n) = (lambda_m.max(m), lambda_n.max(n));
        if top_m > horizon.0 || top_n > horizon.1 {
            return Err(Error::OutOfRange { m: top_m, n: top_n, max_m: horizon.0, max_n: horizon.1 });
        }
        Ok(Window { variant, m, n, lambda, lambda_m, lambda_n })
    }

    /// Writes the window mean into `out`.
    pub fn value_into(
        &self,
        prefix: &PrefixTable,
        p: &CumulativeWeights,
        q: &CumulativeWeights,
        out: &mut [f64],
    ) -> Result<()> {
        let Window { variant, m, n, lambda, lambda_m, lambda_n } = *self;
        let (lo_m, hi_m) = (m.min(lambda_m), m.max(lambda_m));
        let (lo_n, hi_n) = (n.min(lambda_n), n.max(lambda_n));
        let denom = if variant.is_double() {
            p.span(lo_m as isize, hi_m) * q.span(lo_n as isize, hi_n)
        } else {
            p.span(lo_m as isize, hi_m)
        };
        if denom == 0.0 {
            return Err(Error::FlatWeights { m, n, lambda });
        }
        if variant.is_double() {
            prefix.window_sum(lo_m as isize, hi_m, lo_n as isize, hi_n, out);
        } else {
            prefix.row_strip_sum(lo_m as isize, hi_m, n, out);
        }
        let x = prefix.values().at(m, n);
        let sign = if variant.is_gt1() { 1.0 } else { -1.0 };
        for (o, xi) in out.iter_mut().zip(x) {
            *o = sign * (*o / denom - xi);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RectangleMean {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub lambda_m: usize,
    /// `None` for strip variants.
    pub lambda_n: Option<usize>,
    pub value: Vector,
    pub variant: Variant,
}

/// Window mean computed from prefix sums.
pub fn rectangle_mean(
    prefix: &PrefixTable,
    p: &CumulativeWeights,
    q: &CumulativeWeights,
    m: usize,
    n: usize,
    lambda: f64,
    variant: Variant,
) -> Result<RectangleMean> {
    check_cover(prefix, p, q)?;
    let w = Window::new(variant, m, n, lambda, prefix.horizon())?;
    let mut out = vec![0.0; prefix.dim()];
    w.value_into(prefix, p, q, &mut out)?;
    Ok(RectangleMean {
        m,
        n,
        lambda,
        lambda_m: w.lambda_m,
        lambda_n: variant.is_double().then_some(w.lambda_n),
        value: Vector::new(out)?,
        variant,
    })
}

/// Both sides of a decomposition identity. `lhs` is the window mean written
/// with increments `x_{jk} - x_{mn}`, which for the lt1 variants is the
/// negated window mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub lhs: Vector,
    pub rhs: Vector,
    pub residual: f64,
}

impl Decomposition {
    /// `residual <= tol * (1 + ‖lhs‖)`.
    pub fn within(&self, tol: f64) -> bool {
        self.residual <= tol * (1.0 + euclidean(&self.lhs))
    }
}

fn euclidean(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Re-expresses the window mean through the mean table:
///
/// - rectangles: `T - x + α(T - t_{a,B}) + β(T - t_{A,b}) + αβ(T - t_{a,B} - t_{A,b} + t_{a,b})`
///   where `A, B` are the outer and `a, b` the inner corners and
///   `α = P_a / (P_A - P_a)`, `β = Q_b / (Q_B - Q_b)`, `T = t_{A,B}`;
/// - strips: `T - x + α(T - t_a)` in `t^{10}` along row `n`.
///
/// For gt1 the outer corner is `(λ_m, λ_n)`; for lt1 it is `(m, n)`.
pub fn verify_decomposition(
    prefix: &PrefixTable,
    means: &MeanTable,
    p: &CumulativeWeights,
    q: &CumulativeWeights,
    m: usize,
    n: usize,
    lambda: f64,
    variant: Variant,
) -> Result<Decomposition> {
    if means.alpha_beta() != variant.alpha_beta() {
        return Err(Error::InvalidParameter(format!(
            "{variant} decomposes through t^{} means, got {}",
            variant.alpha_beta(),
            means.alpha_beta()
        )));
    }
    if means.horizon() != prefix.horizon() {
        return Err(Error::InvalidParameter("mean table and prefix table horizons differ".into()));
    }
    let window = rectangle_mean(prefix, p, q, m, n, lambda, variant)?;
    let sign = if variant.is_gt1() { 1.0 } else { -1.0 };
    let lhs: Vec<f64> = window.value.iter().map(|v| sign * v).collect();

    let (lm, ln) = (window.lambda_m, window.lambda_n.unwrap_or(n));
    let ((big_m, small_m), (big_n, small_n)) = if variant.is_gt1() { ((lm, m), (ln, n)) } else { ((m, lm), (n, ln)) };
    let alpha = p.get(small_m) / (p.get(big_m) - p.get(small_m));
    let x = prefix.values().at(m, n);
    let rhs: Vec<f64> = if variant.is_double() {
        let beta = q.get(small_n) / (q.get(big_n) - q.get(small_n));
        let (t, t_ab, t_ab2, t_small) =
            (means.at(big_m, big_n), means.at(small_m, big_n), means.at(big_m, small_n), means.at(small_m, small_n));
        (0..x.len())
            .map(|i| {
                t[i] - x[i]
                    + alpha * (t[i] - t_ab[i])
                    + beta * (t[i] - t_ab2[i])
                    + alpha * beta * (t[i] - t_ab[i] - t_ab2[i] + t_small[i])
            })
            .collect()
    } else {
        let (t, t_small) = (means.at(big_m, n), means.at(small_m, n));
        (0..x.len()).map(|i| t[i] - x[i] + alpha * (t[i] - t_small[i])).collect()
    };
    let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let residual = euclidean(&diff);
    Ok(Decomposition { lhs: Vector::new(lhs)?, rhs: Vector::new(rhs)?, residual })
}

/// All three mean tables, built in parallel.
pub fn all_mean_tables(
    prefix: &PrefixTable,
    p: &CumulativeWeights,
    q: &CumulativeWeights,
) -> Result<[MeanTable; 3]> {
    let tables: Vec<Result<MeanTable>> =
        AlphaBeta::ALL.par_iter().map(|&ab| mean_table(prefix, p, q, ab)).collect();
    let mut it = tables.into_iter();
    Ok([it.next().unwrap()?, it.next().unwrap()?, it.next().unwrap()?])
}
