use serde::Serialize;

use super::{Grids, Status};
use crate::means::dilate;
use crate::sequences::CumulativeWeights;
use crate::{Error, Result};

/// Per-`λ` tail infimum of `|P_{λ_m}/P_m - 1|` required for membership.
pub const SVA_THRESHOLD: f64 = 1e-3;
/// Largest relative drop of that infimum from the first to the second half
/// of the tail still read as "bounded away from zero".
pub const SVA_DECAY_LIMIT: f64 = 0.01;
/// Tolerance of the `limsup (P_{λ_m} - P_m)/P_m = λ^ρ - 1` check.
pub const LIMSUP_TOLERANCE: f64 = 0.05;
/// Smallest index estimate accepted as positive.
pub const POSITIVE_INDEX_FLOOR: f64 = 0.05;
/// Largest relative drift of the index estimate across the tail.
pub const INDEX_DRIFT_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaSeparation {
    pub lambda: f64,
    /// `min |P_{λ_m}/P_m - 1|` over the tail.
    pub tail_inf: f64,
    pub at_m: usize,
    /// `1 - inf(second half) / inf(first half)`.
    pub decay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvaEstimate {
    pub status: Status,
    pub weights: String,
    pub horizon: usize,
    /// Index range `[floor(M'/2), M']`, `M' = floor(M / max λ)`.
    pub tail: (usize, usize),
    pub per_lambda: Vec<LambdaSeparation>,
}

impl SvaEstimate {
    pub fn in_sva(&self) -> bool {
        self.status == Status::Holds
    }
}

fn check_horizon(p: &CumulativeWeights, grids: &Grids) -> Result<usize> {
    grids.validate()?;
    let h = grids.weight_horizon;
    if p.horizon() < h {
        return Err(Error::InvalidParameter(format!(
            "cumulative weights reach index {}, the weight horizon is {h}",
            p.horizon()
        )));
    }
    Ok(h)
}

fn split_tail(hi: usize) -> (usize, usize, usize) {
    let lo = (hi / 2).max(1);
    (lo, (lo + hi) / 2, hi)
}

/// `liminf_m |P_{λ_m}/P_m - 1| > 0` for every grid `λ ≠ 1`, estimated over
/// the upper half of `[0, M']`. Membership requires each tail infimum to
/// reach [`SVA_THRESHOLD`] and to have stopped shrinking
/// ([`SVA_DECAY_LIMIT`]); the second test separates logarithmic growth, whose
/// ratios creep towards 1, from genuinely separated sums.
pub fn sva_plus_estimate(p: &CumulativeWeights, grids: &Grids) -> Result<SvaEstimate> {
    let h = check_horizon(p, grids)?;
    let max_lambda = grids.lambda_gt1.iter().cloned().fold(1.0, f64::max);
    let top = (h as f64 / max_lambda).floor() as usize;
    let (lo, mid, hi) = split_tail(top);
    let lambdas = grids.lambda_gt1.iter().chain(&grids.lambda_lt1);
    let per_lambda = lambdas
        .map(|&lambda| {
            let gap = |m: usize| (p.get(dilate(lambda, m)) / p.get(m) - 1.0).abs();
            let inf = |range: std::ops::RangeInclusive<usize>| {
                range.fold((f64::INFINITY, 0), |(v, at), m| {
                    let g = gap(m);
                    if g < v {
                        (g, m)
                    } else {
                        (v, at)
                    }
                })
            };
            let (first, at_first) = inf(lo..=mid);
            let (second, at_second) = inf(mid..=hi);
            let (tail_inf, at_m) = if second < first { (second, at_second) } else { (first, at_first) };
            let decay = if first > 0.0 { 1.0 - second / first } else { 0.0 };
            LambdaSeparation { lambda, tail_inf, at_m, decay }
        })
        .collect::<Vec<_>>();
    let member = per_lambda.iter().all(|s| s.tail_inf >= SVA_THRESHOLD && s.decay <= SVA_DECAY_LIMIT);
    Ok(SvaEstimate {
        status: if member { Status::Holds } else { Status::Fails },
        weights: p.descriptor().to_string(),
        horizon: h,
        tail: (lo, hi),
        per_lambda,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegVarEstimate {
    pub weights: String,
    pub lambda: f64,
    pub horizon: usize,
    pub tail: (usize, usize),
    /// Median of `log(P_{λ_m}/P_m) / log λ` over the tail.
    pub rho_hat: f64,
    /// `1 - median(second half) / median(first half)`.
    pub drift: f64,
    /// Tail maximum of `(P_{λ_m} - P_m)/P_m`.
    pub limsup: f64,
    /// `λ^ρ̂ - 1`.
    pub expected_limsup: f64,
    pub limsup_check: bool,
    pub positive_index: bool,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Estimates the index `ρ` in `P_{λ_m}/P_m -> λ^ρ` at one `λ > 1`.
///
/// A positive index is reported only when `ρ̂` exceeds
/// [`POSITIVE_INDEX_FLOOR`] and is stable across the tail; slowly varying
/// sums such as `log m` give small, drifting estimates.
pub fn regvar_index_estimate(p: &CumulativeWeights, lambda: f64, grids: &Grids) -> Result<RegVarEstimate> {
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("regular variation needs lambda > 1, got {lambda}")));
    }
    let h = check_horizon(p, grids)?;
    let top = (h as f64 / lambda).floor() as usize;
    let (lo, mid, hi) = split_tail(top);
    let ratio = |m: usize| p.get(dilate(lambda, m)) / p.get(m);
    let index: Vec<f64> = (lo..=hi).map(|m| ratio(m).ln() / lambda.ln()).collect();
    let rho_hat = median(&mut index.clone());
    let split = mid - lo;
    let first = median(&mut index[..split.max(1)].to_vec());
    let second = median(&mut index[split..].to_vec());
    let drift = if first != 0.0 { 1.0 - second / first } else { 0.0 };
    let limsup = (lo..=hi).map(|m| ratio(m) - 1.0).fold(f64::NEG_INFINITY, f64::max);
    let expected_limsup = lambda.powf(rho_hat) - 1.0;
    Ok(RegVarEstimate {
        weights: p.descriptor().to_string(),
        lambda,
        horizon: h,
        tail: (lo, hi),
        rho_hat,
        drift,
        limsup,
        expected_limsup,
        limsup_check: (limsup - expected_limsup).abs() <= LIMSUP_TOLERANCE,
        positive_index: rho_hat > POSITIVE_INDEX_FLOOR && drift.abs() <= INDEX_DRIFT_LIMIT,
    })
}
