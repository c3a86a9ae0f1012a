use std::collections::VecDeque;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use super::{merge_peaks, ConditionEstimate, Grade, Grader, Grids, Key, LambdaResult, Peak, Witness};
use crate::ifn::IFNormPair;
use crate::means::dilate;
use crate::sequences::{DoubleSequence, Lattice};
use crate::{Error, Result};

/// Oscillation senses share the `(α, β)` labels of the means.
pub use crate::means::AlphaBeta as Sense;

/// Cell-pair evaluations allowed per `λ` on the brute-force path before
/// anchors are thinned.
const BRUTE_FORCE_CAP: usize = 50_000_000;

/// Anchors `i` in `[tail, max]` whose window `(i, floor(λ i)]` is nonempty
/// and ends inside `[0, max]`. Both conditions are monotone in `i`.
pub(crate) fn window_anchor_range(lambda: f64, tail: usize, max: usize) -> Option<RangeInclusive<usize>> {
    let lo = (tail..=max).find(|&i| dilate(lambda, i) > i)?;
    let hi = (lo..=max).rev().find(|&i| dilate(lambda, i) <= max)?;
    (lo <= hi && dilate(lambda, hi) <= max).then_some(lo..=hi)
}

/// For each anchor `i`, max and min of `value(j)` over `j ∈ (i, hi(i)]`,
/// with `hi` non-decreasing. Monotone deques give `O(len)` total work.
fn window_extrema(
    anchors: RangeInclusive<usize>,
    hi: impl Fn(usize) -> usize,
    value: impl Fn(usize) -> f64,
    out_max: &mut [f64],
    out_min: &mut [f64],
) {
    let mut qmax: VecDeque<usize> = VecDeque::new();
    let mut qmin: VecDeque<usize> = VecDeque::new();
    let start = *anchors.start();
    let mut next = start + 1;
    for (slot, i) in anchors.enumerate() {
        let end = hi(i);
        while next <= end {
            let v = value(next);
            while qmax.back().is_some_and(|&b| value(b) <= v) {
                qmax.pop_back();
            }
            qmax.push_back(next);
            while qmin.back().is_some_and(|&b| value(b) >= v) {
                qmin.pop_back();
            }
            qmin.push_back(next);
            next += 1;
        }
        while qmax.front().is_some_and(|&f| f <= i) {
            qmax.pop_front();
        }
        while qmin.front().is_some_and(|&f| f <= i) {
            qmin.pop_front();
        }
        out_max[slot] = value(*qmax.front().expect("nonempty window"));
        out_min[slot] = value(*qmin.front().expect("nonempty window"));
    }
}

struct Anchors {
    rows: RangeInclusive<usize>,
    cols: RangeInclusive<usize>,
    /// Upper window end along each index; identity when that index is fixed.
    row_window: bool,
    col_window: bool,
}

impl Anchors {
    fn new(sense: Sense, lambda: f64, grids: &Grids) -> Option<Self> {
        let (max_m, max_n) = grids.horizon;
        let tail = grids.tail_start;
        let (row_window, col_window) = match sense {
            Sense::OneOne => (true, true),
            Sense::OneZero => (true, false),
            Sense::ZeroOne => (false, true),
        };
        let rows = if row_window { window_anchor_range(lambda, tail, max_m)? } else { tail..=max_m };
        let cols = if col_window { window_anchor_range(lambda, tail, max_n)? } else { tail..=max_n };
        Some(Anchors { rows, cols, row_window, col_window })
    }

    fn count(&self) -> usize {
        (self.rows.end() - self.rows.start() + 1) * (self.cols.end() - self.cols.start() + 1)
    }

    fn row_hi(&self, lambda: f64, m: usize) -> (usize, usize) {
        if self.row_window {
            (m + 1, dilate(lambda, m))
        } else {
            (m, m)
        }
    }

    fn col_hi(&self, lambda: f64, n: usize) -> (usize, usize) {
        if self.col_window {
            (n + 1, dilate(lambda, n))
        } else {
            (n, n)
        }
    }
}

/// Largest `‖x_{jk} - x_{mn}‖` over each anchor's window, for norms fixed
/// by coordinatewise extremes. Returns `(r, anchor)` maximal with the
/// smallest anchor on ties.
fn max_window_increment(lattice: &Lattice, a: &Anchors, lambda: f64) -> (f64, (usize, usize)) {
    let dim = lattice.dim();
    let (m0, n0) = (*a.rows.start(), *a.cols.start());
    let rows = a.rows.end() - m0 + 1;
    let cols = a.cols.end() - n0 + 1;
    let mut r = vec![0.0f64; rows * cols];
    let col_span = if a.col_window { n0 + 1..=dilate(lambda, *a.cols.end()) } else { n0..=*a.cols.end() };
    for c in 0..dim {
        // Phase 1: extremes over the row window for every needed column.
        let (row_max, row_min): (Vec<Vec<f64>>, Vec<Vec<f64>>) = if a.row_window {
            col_span
                .clone()
                .into_par_iter()
                .map(|k| {
                    let mut hi = vec![0.0; rows];
                    let mut lo = vec![0.0; rows];
                    window_extrema(a.rows.clone(), |m| dilate(lambda, m), |j| lattice.at(j, k)[c], &mut hi, &mut lo);
                    (hi, lo)
                })
                .unzip()
        } else {
            col_span
                .clone()
                .map(|k| {
                    let v: Vec<f64> = a.rows.clone().map(|m| lattice.at(m, k)[c]).collect();
                    (v.clone(), v)
                })
                .unzip()
        };
        let k0 = *col_span.start();
        // Phase 2: extremes over the column window, per anchor row.
        let per_row: Vec<Vec<f64>> = (0..rows)
            .into_par_iter()
            .map(|i| {
                let m = m0 + i;
                let mut hi = vec![0.0; cols];
                let mut lo = vec![0.0; cols];
                if a.col_window {
                    let mut lo2 = vec![0.0; cols];
                    let mut hi2 = vec![0.0; cols];
                    window_extrema(a.cols.clone(), |n| dilate(lambda, n), |k| row_max[k - k0][i], &mut hi, &mut lo2);
                    window_extrema(a.cols.clone(), |n| dilate(lambda, n), |k| row_min[k - k0][i], &mut hi2, &mut lo);
                } else {
                    for (s, n) in a.cols.clone().enumerate() {
                        hi[s] = row_max[n - k0][i];
                        lo[s] = row_min[n - k0][i];
                    }
                }
                a.cols
                    .clone()
                    .enumerate()
                    .map(|(s, n)| {
                        let x = lattice.at(m, n)[c];
                        (hi[s] - x).max(x - lo[s])
                    })
                    .collect()
            })
            .collect();
        for (i, row) in per_row.into_iter().enumerate() {
            for (s, v) in row.into_iter().enumerate() {
                let cell = &mut r[i * cols + s];
                *cell = cell.max(v);
            }
        }
    }
    let mut best = (f64::NEG_INFINITY, (0, 0));
    for i in 0..rows {
        for s in 0..cols {
            let v = r[i * cols + s];
            if v > best.0 {
                best = (v, (m0 + i, n0 + s));
            }
        }
    }
    best
}

/// The window cell of `anchor` attaining the largest increment norm.
fn window_argmax(lattice: &Lattice, a: &Anchors, lambda: f64, anchor: (usize, usize), norm: impl Fn(&[f64]) -> f64) -> (usize, usize) {
    let (m, n) = anchor;
    let x = lattice.at(m, n);
    let mut diff = vec![0.0; x.len()];
    let mut best = (f64::NEG_INFINITY, (m, n));
    let (j0, j1) = a.row_hi(lambda, m);
    let (k0, k1) = a.col_hi(lambda, n);
    for j in j0..=j1 {
        for k in k0..=k1 {
            for (d, (y, x)) in diff.iter_mut().zip(lattice.at(j, k).iter().zip(x)) {
                *d = y - x;
            }
            let v = norm(&diff);
            if v > best.0 {
                best = (v, (j, k));
            }
        }
    }
    best.1
}

fn brute_force(
    lattice: &Lattice,
    a: &Anchors,
    lambda: f64,
    grader: &Grader,
    t_grid: &[f64],
) -> (Vec<Peak>, bool) {
    let slots = grader.slots(t_grid.len());
    let rows: Vec<usize> = a.rows.clone().collect();
    let cols: Vec<usize> = a.cols.clone().collect();
    let span = |(lo, hi): (usize, usize)| hi + 1 - lo;
    let work: usize = rows.iter().map(|&m| span(a.row_hi(lambda, m))).sum::<usize>()
        * cols.iter().map(|&n| span(a.col_hi(lambda, n))).sum::<usize>()
        * slots;
    let stride = if work > BRUTE_FORCE_CAP {
        ((work as f64 / BRUTE_FORCE_CAP as f64).sqrt().ceil() as usize).max(2)
    } else {
        1
    };
    let dim = lattice.dim();
    let table = rows
        .par_iter()
        .step_by(stride)
        .fold(
            || (vec![Peak::EMPTY; slots], vec![0.0; dim]),
            |(mut acc, mut diff), &m| {
                for &n in cols.iter().step_by(stride) {
                    let x = lattice.at(m, n);
                    let (j0, j1) = a.row_hi(lambda, m);
                    let (k0, k1) = a.col_hi(lambda, n);
                    for j in j0..=j1 {
                        for k in k0..=k1 {
                            for (d, (y, x)) in diff.iter_mut().zip(lattice.at(j, k).iter().zip(x)) {
                                *d = y - x;
                            }
                            grader.offer(&diff, [m, n, j, k], t_grid, &mut acc);
                        }
                    }
                }
                (acc, diff)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(
            || vec![Peak::EMPTY; slots],
            |mut a, b| {
                merge_peaks(&mut a, &b);
                a
            },
        );
    (table, stride > 1)
}

pub(crate) fn slow_oscillation_on(
    lattice: &Lattice,
    pair: &IFNormPair,
    sense: Sense,
    grids: &Grids,
    t_grid: &[f64],
) -> Result<ConditionEstimate> {
    grids.validate()?;
    if pair.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch { expected: pair.dim(), actual: lattice.dim() });
    }
    let (lm, ln) = lattice.horizon();
    if lm < grids.horizon.0 || ln < grids.horizon.1 {
        return Err(Error::OutOfRange { m: grids.horizon.0, n: grids.horizon.1, max_m: lm, max_n: ln });
    }
    let grader = Grader::new(pair);
    let exact = pair.profile().filter(|p| p.norm.is_coordinate_separable() || lattice.dim() == 1).copied();
    let tail_anchors = (grids.horizon.0 + 1 - grids.tail_start) * (grids.horizon.1 + 1 - grids.tail_start);
    let results = grids
        .lambda_gt1
        .iter()
        .map(|&lambda| {
            let Some(a) = Anchors::new(sense, lambda, grids) else {
                return LambdaResult { lambda, grades: Vec::new(), anchors: 0, skipped: tail_anchors, sampled: false };
            };
            let (peaks, sampled) = match exact {
                Some(profile) => {
                    let (r, anchor) = max_window_increment(lattice, &a, lambda);
                    let (j, k) = window_argmax(lattice, &a, lambda, anchor, |d| profile.norm.norm(d));
                    (vec![Peak { value: r, at: [anchor.0, anchor.1, j, k] }], false)
                }
                None => brute_force(lattice, &a, lambda, &grader, t_grid),
            };
            let grades: Vec<Grade> = grader.finish(&peaks, t_grid);
            LambdaResult { lambda, grades, anchors: a.count(), skipped: tail_anchors - a.count(), sampled }
        })
        .collect();
    Ok(ConditionEstimate::assemble(
        format!("slow-oscillation{sense}"),
        &Grids { t_grid: t_grid.to_vec(), ..grids.clone() },
        results,
        window_witness,
    ))
}

fn window_witness(key: Key, lambda: f64, t: f64, mu: f64, nu: f64) -> Witness {
    Witness { m: key[0], n: key[1], j: Some(key[2]), k: Some(key[3]), lambda: Some(lambda), t, mu, nu }
}

/// Tail minimum over anchors of the minimum over the window of
/// `μ(x_{jk} - x_{mn}, t)` (and the `ν` maximum), per `(λ, t)`, for the
/// rectangle `(m, λ_m] x (n, λ_n]` (sense (1,1)) or the strips (senses
/// (1,0), (0,1)).
pub fn slow_oscillation_estimate(
    seq: &DoubleSequence,
    pair: &IFNormPair,
    sense: Sense,
    grids: &Grids,
) -> Result<ConditionEstimate> {
    grids.validate()?;
    let lattice = Lattice::sample(seq, grids.horizon.0, grids.horizon.1)?;
    slow_oscillation_on(&lattice, pair, sense, grids, &grids.t_grid)
}
