//! Brute-force oracles written directly from the definitions, independent of
//! the prefix-table machinery.
#![allow(dead_code)]

use std::sync::Arc;

use ifns_core::means::{dilate, Variant};
use ifns_core::sequences::{DoubleSequence, WeightSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense `(M+1) × (N+1) × d` grid of values.
#[derive(Debug, Clone)]
pub struct Grid {
    pub m: usize,
    pub n: usize,
    pub dim: usize,
    pub data: Arc<Vec<f64>>,
}

impl Grid {
    pub fn at(&self, j: usize, k: usize) -> &[f64] {
        let o = (j * (self.n + 1) + k) * self.dim;
        &self.data[o..o + self.dim]
    }

    pub fn sequence(&self) -> DoubleSequence {
        let g = self.clone();
        DoubleSequence::from_fn("grid", self.dim, move |j, k, out| {
            out.copy_from_slice(g.at(j.min(g.m), k.min(g.n)));
            Ok(())
        })
    }
}

pub fn random_grid(rng: &mut ChaCha8Rng, m: usize, n: usize, dim: usize) -> Grid {
    let data = (0..(m + 1) * (n + 1) * dim).map(|_| rng.random_range(-10.0..10.0)).collect();
    Grid { m, n, dim, data: Arc::new(data) }
}

/// Small integers, so every sum below is exact in `f64`.
pub fn integer_grid(rng: &mut ChaCha8Rng, m: usize, n: usize, dim: usize) -> Grid {
    let data = (0..(m + 1) * (n + 1) * dim).map(|_| rng.random_range(-50i32..=50) as f64).collect();
    Grid { m, n, dim, data: Arc::new(data) }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random strictly positive weights, rebuilt as a finitely listed sequence
/// extended by ones.
pub fn random_weights(rng: &mut ChaCha8Rng, len: usize) -> (WeightSequence, Vec<f64>) {
    let values: Vec<f64> = (0..len).map(|_| rng.random_range(0.1..5.0)).collect();
    let owned = values.clone();
    let w = WeightSequence::from_fn("random", true, move |j| owned.get(j).copied().unwrap_or(1.0)).unwrap();
    (w, values)
}

pub fn weight_vec(w: &WeightSequence, len: usize) -> Vec<f64> {
    (0..len).map(|j| w.weight(j)).collect()
}

fn sum(xs: &[f64]) -> f64 {
    xs.iter().sum()
}

/// `Σ_{j ∈ js, k ∈ ks} p_j q_k x_{jk} / Σ p_j q_k`.
pub fn weighted_average(
    g: &Grid,
    p: &[f64],
    q: &[f64],
    js: impl Iterator<Item = usize> + Clone,
    ks: impl Iterator<Item = usize> + Clone,
) -> Vec<f64> {
    let mut acc = vec![0.0; g.dim];
    let mut w = 0.0;
    for j in js {
        for k in ks.clone() {
            let c = p[j] * q[k];
            w += c;
            for (a, x) in acc.iter_mut().zip(g.at(j, k)) {
                *a += c * x;
            }
        }
    }
    acc.iter().map(|a| a / w).collect()
}

/// `t^{αβ}_{mn}` by direct summation over the initial rectangle/strip.
pub fn mean(g: &Grid, p: &[f64], q: &[f64], ab: (u8, u8), m: usize, n: usize) -> Vec<f64> {
    let ones_p = vec![1.0; p.len()];
    let ones_q = vec![1.0; q.len()];
    match ab {
        (1, 1) => weighted_average(g, p, q, 0..=m, 0..=n),
        (1, 0) => weighted_average(g, p, &ones_q, 0..=m, n..=n),
        (0, 1) => weighted_average(g, &ones_p, q, m..=m, 0..=n),
        _ => unreachable!(),
    }
}

/// Window value by direct summation; `None` for an empty window.
pub fn window(g: &Grid, p: &[f64], q: &[f64], variant: Variant, m: usize, n: usize, lambda: f64) -> Option<Vec<f64>> {
    let lm = dilate(lambda, m);
    let ln = if variant.is_double() { dilate(lambda, n) } else { n };
    let ones_q = vec![1.0; q.len()];
    let avg = match (variant.is_gt1(), variant.is_double()) {
        (true, true) if lm > m && ln > n => weighted_average(g, p, q, m + 1..=lm, n + 1..=ln),
        (true, false) if lm > m => weighted_average(g, p, &ones_q, m + 1..=lm, n..=n),
        (false, true) if lm < m && ln < n => weighted_average(g, p, q, lm + 1..=m, ln + 1..=n),
        (false, false) if lm < m => weighted_average(g, p, &ones_q, lm + 1..=m, n..=n),
        _ => return None,
    };
    let x = g.at(m, n);
    Some(if variant.is_gt1() {
        avg.iter().zip(x).map(|(a, x)| a - x).collect()
    } else {
        avg.iter().zip(x).map(|(a, x)| x - a).collect()
    })
}

/// Cells of the window that the mean averages over.
pub fn window_cells(variant: Variant, m: usize, n: usize, lambda: f64) -> Vec<(usize, usize)> {
    let lm = dilate(lambda, m);
    let ln = if variant.is_double() { dilate(lambda, n) } else { n };
    let (js, ks) = match (variant.is_gt1(), variant.is_double()) {
        (true, true) => (m + 1..=lm, n + 1..=ln),
        (true, false) => (m + 1..=lm, n..=n),
        (false, true) => (lm + 1..=m, ln + 1..=n),
        (false, false) => (lm + 1..=m, n..=n),
    };
    js.flat_map(|j| ks.clone().map(move |k| (j, k))).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

pub fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    max_abs_diff(a, b) <= tol * (1.0 + max_abs(b))
}

pub fn sum_of(xs: &[f64]) -> f64 {
    sum(xs)
}
