//! Finite-horizon estimators.
//!
//! Every `lim`, `liminf` and `limsup` over `m, n -> ∞` is replaced by an
//! extremum over the tail square `[tail_start, M] x [tail_start, N]`, every
//! `sup`/`inf` over `λ` by an extremum over a finite grid, and every "for all
//! `t > 0`, `ε ∈ (0,1)`" by the declared `t` and `ε` grids. Results always
//! carry the horizon and grids they were computed on.

mod convergence;
mod harness;
mod oscillation;
mod tauberian;
mod weights;

use serde::Serialize;

use crate::ifn::{IFNormPair, NormProfile};
use crate::{Error, Result};

pub use convergence::{cauchy_verdict, convergence_verdict, q_bounded_estimate, summability_verdict, QBoundedEstimate};
pub use harness::{theorem_harness, Analysis, Evidence, Instance, Theorem, TheoremCheck, TheoremReport, CAUCHY_PAIR_CAP};
pub use oscillation::{slow_oscillation_estimate, Sense};
pub use tauberian::tauberian_condition;
pub use weights::{regvar_index_estimate, sva_plus_estimate, LambdaSeparation, RegVarEstimate, SvaEstimate};

/// A verdict whose tail deficiency shrinks by less than this factor between
/// the tail square and its upper half is treated as stalled.
pub const STALL_RATIO: f64 = 0.99;

/// Quantifier grids and horizons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grids {
    pub t_grid: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub lambda_gt1: Vec<f64>,
    pub lambda_lt1: Vec<f64>,
    /// `(M, N)` for double-index scans.
    pub horizon: (usize, usize),
    pub tail_start: usize,
    /// Horizon for single-index weight scans.
    pub weight_horizon: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            t_grid: (0..=10).map(|i| 10f64.powf(-2.0 + 0.5 * i as f64)).collect(),
            eps_grid: vec![0.1, 0.01, 0.001],
            lambda_gt1: vec![2.0, 1.5, 1.25, 1.1, 1.05],
            lambda_lt1: vec![0.5, 0.75, 0.9, 0.95],
            horizon: (2000, 2000),
            tail_start: 1000,
            weight_horizon: 10_000,
        }
    }
}

fn strictly(values: &[f64], ascending: bool) -> bool {
    values.windows(2).all(|w| if ascending { w[0] < w[1] } else { w[0] > w[1] })
}

impl Grids {
    /// Sets the horizon and moves `tail_start` to `floor(min(M, N) / 2)`.
    pub fn with_horizon(mut self, max_m: usize, max_n: usize) -> Self {
        self.horizon = (max_m, max_n);
        self.tail_start = max_m.min(max_n) / 2;
        self
    }

    pub fn with_t_grid(mut self, t_grid: Vec<f64>) -> Self {
        self.t_grid = t_grid;
        self
    }

    pub fn with_eps_grid(mut self, eps_grid: Vec<f64>) -> Self {
        self.eps_grid = eps_grid;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.t_grid.is_empty() || !strictly(&self.t_grid, true) || self.t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return bad(format!("t grid must be nonempty, positive and strictly ascending: {:?}", self.t_grid));
        }
        let eps_ok = strictly(&self.eps_grid, true) || strictly(&self.eps_grid, false);
        if self.eps_grid.is_empty() || !eps_ok || self.eps_grid.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return bad(format!("eps grid must be nonempty, strictly monotone, inside (0, 1): {:?}", self.eps_grid));
        }
        if self.lambda_gt1.is_empty()
            || !strictly(&self.lambda_gt1, false)
            || self.lambda_gt1.iter().any(|l| !(*l > 1.0 && l.is_finite()))
        {
            return bad(format!("lambda > 1 grid must be nonempty, > 1 and strictly descending: {:?}", self.lambda_gt1));
        }
        if self.lambda_lt1.is_empty() || !strictly(&self.lambda_lt1, true) || self.lambda_lt1.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
            return bad(format!(
                "lambda < 1 grid must be nonempty, inside (0, 1) and strictly ascending: {:?}",
                self.lambda_lt1
            ));
        }
        let (m, n) = self.horizon;
        if self.tail_start >= m.min(n) {
            return bad(format!("tail_start {} must be below min(M, N) = {}", self.tail_start, m.min(n)));
        }
        if self.weight_horizon < 2 {
            return bad("weight horizon must be at least 2".into());
        }
        Ok(())
    }

    /// Start of the upper half of the tail square.
    pub fn mid_start(&self) -> usize {
        (self.tail_start + self.horizon.0.min(self.horizon.1)) / 2
    }

    /// `t_grid ∪ t_grid / kappa`, ascending. Used where a proof feeds
    /// hypotheses at `t / kappa` into a conclusion at `t`.
    pub fn t_grid_with_split(&self, kappa: f64) -> Vec<f64> {
        let mut t: Vec<f64> = self.t_grid.iter().flat_map(|&t| [t, t / kappa]).collect();
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }
}

/// Three-valued outcome of a finite-horizon check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    #[serde(rename = "holds-at-horizon")]
    Holds,
    #[serde(rename = "fails-at-horizon")]
    Fails,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Holds => "holds-at-horizon",
            Status::Fails => "fails-at-horizon",
            Status::Inconclusive => "inconclusive",
        }
    }

    pub fn holds(self) -> bool {
        self == Status::Holds
    }

    /// `Holds` if all hold; otherwise `Fails` if any fails; otherwise
    /// `Inconclusive`.
    pub fn all(items: impl IntoIterator<Item = Status>) -> Status {
        let mut out = Status::Holds;
        for s in items {
            match s {
                Status::Fails => return Status::Fails,
                Status::Inconclusive => out = Status::Inconclusive,
                Status::Holds => {}
            }
        }
        out
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A concrete index tuple at which an extreme grade was attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub m: usize,
    pub n: usize,
    /// Second cell (Cauchy pairs, window cells).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub t: f64,
    pub mu: f64,
    pub nu: f64,
}

/// Lexicographic position used to break ties between equal extremes.
pub(crate) type Key = [usize; 4];

const NO_KEY: Key = [usize::MAX; 4];

/// Running maximum with a deterministic witness: on equal values the
/// smallest key wins, so merging in any order gives the same result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Peak {
    pub value: f64,
    pub at: Key,
}

impl Peak {
    pub const EMPTY: Peak = Peak { value: f64::NEG_INFINITY, at: NO_KEY };

    #[inline]
    pub fn offer(&mut self, value: f64, at: Key) {
        if value > self.value || (value == self.value && at < self.at) {
            self.value = value;
            self.at = at;
        }
    }

    #[inline]
    pub fn merge(&mut self, other: &Peak) {
        self.offer(other.value, other.at);
    }

    pub fn is_empty(&self) -> bool {
        self.at == NO_KEY
    }

    pub fn key(&self) -> Option<Key> {
        (!self.is_empty()).then_some(self.at)
    }
}

pub(crate) fn merge_peaks(into: &mut [Peak], from: &[Peak]) {
    for (a, b) in into.iter_mut().zip(from) {
        a.merge(b);
    }
}

/// Worst grades over a set of vectors, at one `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Grade {
    pub mu: f64,
    pub nu: f64,
    pub at_mu: Option<Key>,
    pub at_nu: Option<Key>,
}

impl Grade {
    /// `max(1 - mu, nu)`: zero when both grades are perfect.
    pub fn deficiency(&self) -> f64 {
        (1.0 - self.mu).max(self.nu)
    }

    /// `mu > 1 - eps` and `nu < eps`.
    pub fn strict_ok(&self, eps: f64) -> bool {
        self.mu > 1.0 - eps && self.nu < eps
    }
}

/// Tracks worst grades of vectors across a `t` grid.
///
/// With a norm profile only the largest norm is kept (grades are monotone in
/// the norm); otherwise min `mu` and max `nu` are tracked for every `t`.
#[derive(Clone, Copy)]
pub(crate) enum Grader<'a> {
    Profile(NormProfile),
    Generic(&'a IFNormPair),
}

impl<'a> Grader<'a> {
    pub fn new(pair: &'a IFNormPair) -> Self {
        match pair.profile() {
            Some(p) => Grader::Profile(*p),
            None => Grader::Generic(pair),
        }
    }

    pub fn slots(&self, t_len: usize) -> usize {
        match self {
            Grader::Profile(_) => 1,
            Grader::Generic(_) => 2 * t_len,
        }
    }

    #[inline]
    pub fn offer(&self, x: &[f64], at: Key, t_grid: &[f64], slots: &mut [Peak]) {
        match self {
            Grader::Profile(p) => slots[0].offer(p.norm.norm(x), at),
            Grader::Generic(pair) => {
                for (i, &t) in t_grid.iter().enumerate() {
                    let (mu, nu) = pair.grades(x, t);
                    slots[2 * i].offer(-mu, at);
                    slots[2 * i + 1].offer(nu, at);
                }
            }
        }
    }

    /// Worst grades per `t`. Empty slots mean nothing was observed, which
    /// grades as perfect.
    pub fn finish(&self, slots: &[Peak], t_grid: &[f64]) -> Vec<Grade> {
        match self {
            Grader::Profile(p) => t_grid
                .iter()
                .map(|&t| {
                    let peak = slots[0];
                    let (mu, nu) = if peak.is_empty() { (1.0, 0.0) } else { (p.grades)(peak.value, t) };
                    Grade { mu, nu, at_mu: peak.key(), at_nu: peak.key() }
                })
                .collect(),
            Grader::Generic(_) => (0..t_grid.len())
                .map(|i| {
                    let (a, b) = (slots[2 * i], slots[2 * i + 1]);
                    Grade {
                        mu: if a.is_empty() { 1.0 } else { -a.value },
                        nu: if b.is_empty() { 0.0 } else { b.value },
                        at_mu: a.key(),
                        at_nu: b.key(),
                    }
                })
                .collect(),
        }
    }
}

/// Outcome for one `(t, ε)` pair of a Pringsheim-type verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDetail {
    pub t: f64,
    pub eps: f64,
    pub status: Status,
    /// Smallest `n0` such that every sampled index (pair) with all indices in
    /// `[n0, horizon]` satisfies the strict inequalities; `None` if even the
    /// corner fails.
    pub n0: Option<usize>,
    /// Worst grades over the tail square and its upper half.
    pub tail_mu: f64,
    pub tail_nu: f64,
    pub mid_mu: f64,
    pub mid_nu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Result of a convergence-type check over the `t` and `ε` grids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    /// Largest per-pair `n0` when every pair holds.
    pub n0_found: Option<usize>,
    pub horizon: (usize, usize),
    pub tail_start: usize,
    pub t_grid: Vec<f64>,
    pub eps_grid: Vec<f64>,
    /// True when index pairs were subsampled.
    pub sampled: bool,
    /// Worst violation among failing or inconclusive pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub details: Vec<PairDetail>,
}

/// Builds a verdict from worst grades over nested squares.
///
/// `square[s][i]` are the worst grades over all sampled index tuples whose
/// indices all lie in `[s, horizon]`, at `t_grid[i]`, for `s = 0..=min(M,N)`.
/// A pair holds when its `n0 <= tail_start`; otherwise it fails if the
/// upper half of the tail violates it and the deficiency has stalled between
/// the tail and its upper half, and is inconclusive if not.
pub(crate) fn verdict_from_squares(
    square: &[Vec<Grade>],
    t_grid: &[f64],
    grids: &Grids,
    sampled: bool,
    witness: impl Fn(Key, f64, f64, f64) -> Witness,
) -> Verdict {
    let (tail, mid) = (grids.tail_start, grids.mid_start());
    let mut details = Vec::new();
    let mut worst: Option<(f64, Witness)> = None;
    for (i, &t) in t_grid.iter().enumerate() {
        for &eps in &grids.eps_grid {
            let n0 = (0..square.len()).find(|&s| square[s][i].strict_ok(eps));
            let (g1, g2) = (square[tail][i], square[mid][i]);
            let status = match n0 {
                Some(s) if s <= tail => Status::Holds,
                _ if !g2.strict_ok(eps) && g2.deficiency() >= STALL_RATIO * g1.deficiency() => Status::Fails,
                _ => Status::Inconclusive,
            };
            // Witness: worst cell of the last failing square.
            let bad = match n0 {
                Some(0) => None,
                Some(s) => Some(square[s - 1][i]),
                None => square.last().map(|v| v[i]),
            };
            let w = bad.and_then(|g| {
                let key = if 1.0 - g.mu >= g.nu { g.at_mu } else { g.at_nu };
                key.map(|k| witness(k, t, g.mu, g.nu))
            });
            if status != Status::Holds {
                if let (Some(w), Some(g)) = (w, bad) {
                    let d = g.deficiency();
                    if worst.as_ref().is_none_or(|(wd, _)| d > *wd) {
                        worst = Some((d, w));
                    }
                }
            }
            details.push(PairDetail {
                t,
                eps,
                status,
                n0,
                tail_mu: g1.mu,
                tail_nu: g1.nu,
                mid_mu: g2.mu,
                mid_nu: g2.nu,
                witness: w,
            });
        }
    }
    let status = Status::all(details.iter().map(|d| d.status));
    let n0_found = if status == Status::Holds { details.iter().filter_map(|d| d.n0).max() } else { None };
    Verdict {
        status,
        n0_found,
        horizon: grids.horizon,
        tail_start: grids.tail_start,
        t_grid: t_grid.to_vec(),
        eps_grid: grids.eps_grid.clone(),
        sampled,
        witness: worst.map(|(_, w)| w),
        details,
    }
}

/// Finite-horizon estimate of a `sup_λ liminf μ(·) = 1` /
/// `inf_λ limsup ν(·) = 0` condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionEstimate {
    pub condition: String,
    pub status: Status,
    pub horizon: (usize, usize),
    pub tail_start: usize,
    pub t_grid: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub lambdas: Vec<LambdaScan>,
    /// One row per `(λ, t)` for every `λ` with data, `λ`-major.
    pub inner: Vec<InnerEstimate>,
    /// One row per `t`: best `μ` and `ν` over the `λ` grid.
    pub outer: Vec<OuterEstimate>,
    pub skipped_windows: usize,
    pub sampled: bool,
}

/// Anchor bookkeeping for one `λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaScan {
    pub lambda: f64,
    pub anchors: usize,
    pub skipped: usize,
    pub sampled: bool,
    pub has_data: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerEstimate {
    pub lambda: f64,
    pub t: f64,
    /// Tail minimum of the `μ` term.
    pub mu: f64,
    /// Tail maximum of the `ν` term.
    pub nu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuterEstimate {
    pub t: f64,
    pub mu: f64,
    pub nu: f64,
    pub best_lambda_mu: Option<f64>,
    pub best_lambda_nu: Option<f64>,
}

/// Scan result for one `λ`: worst grades per `t` plus anchor counts.
pub(crate) struct LambdaResult {
    pub lambda: f64,
    pub grades: Vec<Grade>,
    pub anchors: usize,
    pub skipped: usize,
    pub sampled: bool,
}

impl ConditionEstimate {
    /// Aggregates per-`λ` scans. `λ` values are given in grid order; the
    /// stall test compares the grid entry closest to 1 with the farthest.
    pub(crate) fn assemble(
        condition: String,
        grids: &Grids,
        results: Vec<LambdaResult>,
        witness: impl Fn(Key, f64, f64, f64, f64) -> Witness,
    ) -> Self {
        let t_grid = grids.t_grid.clone();
        let mut inner = Vec::new();
        let mut lambdas = Vec::new();
        for r in &results {
            let has_data = r.anchors > 0;
            lambdas.push(LambdaScan {
                lambda: r.lambda,
                anchors: r.anchors,
                skipped: r.skipped,
                sampled: r.sampled,
                has_data,
            });
            if !has_data {
                continue;
            }
            for (g, &t) in r.grades.iter().zip(&t_grid) {
                let key = if 1.0 - g.mu >= g.nu { g.at_mu } else { g.at_nu };
                inner.push(InnerEstimate {
                    lambda: r.lambda,
                    t,
                    mu: g.mu,
                    nu: g.nu,
                    witness: key.map(|k| witness(k, r.lambda, t, g.mu, g.nu)),
                });
            }
        }
        let with_data: Vec<&LambdaResult> = results.iter().filter(|r| r.anchors > 0).collect();
        let outer: Vec<OuterEstimate> = t_grid
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let mut best_mu: Option<(f64, f64)> = None;
                let mut best_nu: Option<(f64, f64)> = None;
                for r in &with_data {
                    let g = r.grades[i];
                    if best_mu.is_none_or(|(v, _)| g.mu > v) {
                        best_mu = Some((g.mu, r.lambda));
                    }
                    if best_nu.is_none_or(|(v, _)| g.nu < v) {
                        best_nu = Some((g.nu, r.lambda));
                    }
                }
                OuterEstimate {
                    t,
                    mu: best_mu.map_or(0.0, |b| b.0),
                    nu: best_nu.map_or(1.0, |b| b.0),
                    best_lambda_mu: best_mu.map(|b| b.1),
                    best_lambda_nu: best_nu.map(|b| b.1),
                }
            })
            .collect();

        let status = if with_data.is_empty() {
            Status::Inconclusive
        } else {
            let closest = with_data
                .iter()
                .min_by(|a, b| (a.lambda - 1.0).abs().total_cmp(&(b.lambda - 1.0).abs()))
                .unwrap();
            let farthest = with_data
                .iter()
                .max_by(|a, b| (a.lambda - 1.0).abs().total_cmp(&(b.lambda - 1.0).abs()))
                .unwrap();
            let mut status = Status::Holds;
            for (i, o) in outer.iter().enumerate() {
                for &eps in &grids.eps_grid {
                    if o.mu >= 1.0 - eps && o.nu <= eps {
                        continue;
                    }
                    let stalled = closest.grades[i].deficiency() >= STALL_RATIO * farthest.grades[i].deficiency();
                    if stalled {
                        status = Status::Fails;
                    } else if status == Status::Holds {
                        status = Status::Inconclusive;
                    }
                }
            }
            status
        };
        let skipped_windows = results.iter().map(|r| r.skipped).sum();
        let sampled = results.iter().any(|r| r.sampled);
        ConditionEstimate {
            condition,
            status,
            horizon: grids.horizon,
            tail_start: grids.tail_start,
            t_grid,
            eps_grid: grids.eps_grid.clone(),
            lambdas,
            inner,
            outer,
            skipped_windows,
            sampled,
        }
    }

    /// Inner estimate at `(λ, t)`, if `λ` had data.
    pub fn inner_at(&self, lambda: f64, t: f64) -> Option<&InnerEstimate> {
        self.inner.iter().find(|e| e.lambda == lambda && e.t == t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grids() {
        let g = Grids::default();
        g.validate().unwrap();
        assert_eq!(g.t_grid.len(), 11);
        assert!((g.t_grid[0] - 0.01).abs() < 1e-15 && (g.t_grid[10] - 1000.0).abs() < 1e-9);
        assert_eq!(g.mid_start(), 1500);
        let small = Grids::default().with_horizon(40, 30);
        assert_eq!(small.tail_start, 15);
        small.validate().unwrap();
    }

    #[test]
    fn invalid_grids() {
        let mut g = Grids::default();
        g.t_grid = vec![1.0, 0.5];
        assert!(g.validate().is_err());
        let mut g = Grids::default();
        g.lambda_gt1 = vec![1.0];
        assert!(g.validate().is_err());
        let mut g = Grids::default();
        g.tail_start = 2000;
        assert!(g.validate().is_err());
        let mut g = Grids::default();
        g.eps_grid = vec![0.1, 1.0];
        assert!(g.validate().is_err());
    }

    #[test]
    fn split_grid() {
        let g = Grids::default().with_t_grid(vec![1.0, 3.0]);
        assert_eq!(g.t_grid_with_split(3.0), vec![1.0 / 3.0, 1.0, 3.0]);
    }

    #[test]
    fn peaks_are_order_independent() {
        let items = [(1.0, [3, 0, 0, 0]), (2.0, [5, 1, 0, 0]), (2.0, [4, 9, 0, 0]), (0.5, [0, 0, 0, 0])];
        let mut a = Peak::EMPTY;
        let mut b = Peak::EMPTY;
        for (v, k) in items {
            a.offer(v, k);
        }
        for (v, k) in items.iter().rev() {
            b.offer(*v, *k);
        }
        assert_eq!(a, b);
        assert_eq!(a.at, [4, 9, 0, 0]);
    }

    #[test]
    fn status_combination() {
        assert_eq!(Status::all([Status::Holds, Status::Holds]), Status::Holds);
        assert_eq!(Status::all([Status::Holds, Status::Inconclusive]), Status::Inconclusive);
        assert_eq!(Status::all([Status::Inconclusive, Status::Fails]), Status::Fails);
    }
}
