use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{merge_peaks, verdict_from_squares, Grade, Grader, Grids, Key, Peak, Status, Verdict, Witness};
use crate::ifn::IFNormPair;
use crate::means::{mean_table, AlphaBeta};
use crate::sequences::{build_prefix_tables, cumulative, DoubleSequence, Lattice, WeightSequence};
use crate::{Error, Result, Vector};

/// Upper bound on the index pairs examined by a Cauchy check.
pub const PAIR_CAP: usize = 1_000_000;

/// Large scales appended to the `t` grid for q-boundedness.
const Q_BOUND_EXTRA_T: [f64; 2] = [1e4, 1e5];
const Q_BOUND_TOLERANCE: f64 = 1e-2;

fn error_position(e: &Error) -> (usize, usize) {
    match e {
        Error::Evaluation { m, n, .. } | Error::OutOfRange { m, n, .. } => (*m, *n),
        _ => (usize::MAX, usize::MAX),
    }
}

fn earlier(a: Option<Error>, b: Option<Error>) -> Option<Error> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if error_position(&b) < error_position(&a) { b } else { a }),
        (a, b) => a.or(b),
    }
}

/// Evaluates every cell of `[0, M] x [0, N]` (rows in parallel) and lets
/// `visit` fold it into a table of peaks. The table merge is order
/// independent, so the result does not depend on the thread count; on
/// failure the error at the smallest `(m, n)` is returned.
pub(crate) fn stream_cells<F, G>(
    horizon: (usize, usize),
    dim: usize,
    table_len: usize,
    cell: F,
    visit: G,
) -> Result<Vec<Peak>>
where
    F: Fn(usize, usize, &mut [f64]) -> Result<()> + Sync,
    G: Fn(usize, usize, &[f64], &mut [Peak]) + Sync,
{
    let (max_m, max_n) = horizon;
    let init = || (vec![Peak::EMPTY; table_len], vec![0.0; dim], None::<Error>);
    let (table, _, err) = (0..=max_m)
        .into_par_iter()
        .fold(init, |(mut acc, mut buf, mut err), m| {
            if err.is_none() {
                for n in 0..=max_n {
                    if let Err(e) = cell(m, n, &mut buf) {
                        err = Some(e);
                        break;
                    }
                    visit(m, n, &buf, &mut acc);
                }
            }
            (acc, buf, err)
        })
        .reduce(init, |(mut a, buf, ea), (b, _, eb)| {
            merge_peaks(&mut a, &b);
            (a, buf, earlier(ea, eb))
        });
    match err {
        Some(e) => Err(e),
        None => Ok(table),
    }
}

/// Folds per-bucket peaks (`bucket s` = tuples whose smallest index is `s`)
/// into worst grades over the nested squares `[s, horizon]`.
fn squares_from_buckets(buckets: Vec<Peak>, slots: usize, grader: &Grader, t_grid: &[f64]) -> Vec<Vec<Grade>> {
    let count = buckets.len() / slots;
    let mut suffix = vec![Peak::EMPTY; slots];
    let mut out = vec![Vec::new(); count];
    for s in (0..count).rev() {
        merge_peaks(&mut suffix, &buckets[s * slots..(s + 1) * slots]);
        out[s] = grader.finish(&suffix, t_grid);
    }
    out
}

fn cell_witness(key: Key, t: f64, mu: f64, nu: f64) -> Witness {
    Witness { m: key[0], n: key[1], j: None, k: None, lambda: None, t, mu, nu }
}

fn pair_witness(key: Key, t: f64, mu: f64, nu: f64) -> Witness {
    Witness { m: key[2], n: key[3], j: Some(key[0]), k: Some(key[1]), lambda: None, t, mu, nu }
}

fn check_dims(pair: &IFNormPair, dim: usize, limit: Option<&Vector>) -> Result<()> {
    if pair.dim() != dim {
        return Err(Error::DimensionMismatch { expected: pair.dim(), actual: dim });
    }
    if let Some(l) = limit {
        if l.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: l.dim() });
        }
    }
    Ok(())
}

/// Convergence of an arbitrary cell source to `limit` on the given `t` grid.
pub(crate) fn convergence_of<F>(
    cell: F,
    dim: usize,
    pair: &IFNormPair,
    limit: &Vector,
    grids: &Grids,
    t_grid: &[f64],
) -> Result<Verdict>
where
    F: Fn(usize, usize, &mut [f64]) -> Result<()> + Sync,
{
    grids.validate()?;
    check_dims(pair, dim, Some(limit))?;
    let grader = Grader::new(pair);
    let slots = grader.slots(t_grid.len());
    let (max_m, max_n) = grids.horizon;
    let buckets = max_m.min(max_n) + 1;
    let table = stream_cells(
        grids.horizon,
        dim,
        buckets * slots,
        |m, n, out| {
            cell(m, n, out)?;
            for (o, l) in out.iter_mut().zip(limit.iter()) {
                *o -= l;
            }
            Ok(())
        },
        |m, n, x, acc| {
            let s = m.min(n);
            grader.offer(x, [m, n, 0, 0], t_grid, &mut acc[s * slots..(s + 1) * slots]);
        },
    )?;
    let squares = squares_from_buckets(table, slots, &grader, t_grid);
    Ok(verdict_from_squares(&squares, t_grid, grids, false, cell_witness))
}

/// Does `x_{mn} -> limit` hold at the horizon? Cells are streamed, so the
/// lattice is never stored.
pub fn convergence_verdict(seq: &DoubleSequence, pair: &IFNormPair, limit: &Vector, grids: &Grids) -> Result<Verdict> {
    convergence_of(|m, n, out| seq.eval_into(m, n, out), seq.dim(), pair, limit, grids, &grids.t_grid)
}

/// Convergence of a stored lattice (e.g. a mean table).
pub(crate) fn lattice_convergence(
    lattice: &Lattice,
    pair: &IFNormPair,
    limit: &Vector,
    grids: &Grids,
    t_grid: &[f64],
) -> Result<Verdict> {
    let (lm, ln) = lattice.horizon();
    if lm < grids.horizon.0 || ln < grids.horizon.1 {
        return Err(Error::OutOfRange { m: grids.horizon.0, n: grids.horizon.1, max_m: lm, max_n: ln });
    }
    convergence_of(
        |m, n, out| {
            out.copy_from_slice(lattice.at(m, n));
            Ok(())
        },
        lattice.dim(),
        pair,
        limit,
        grids,
        t_grid,
    )
}

/// `(N̄, p, q; α, β)` summability: convergence of the mean table.
pub fn summability_verdict(
    seq: &DoubleSequence,
    p: &WeightSequence,
    q: &WeightSequence,
    pair: &IFNormPair,
    alpha_beta: AlphaBeta,
    limit: &Vector,
    grids: &Grids,
) -> Result<Verdict> {
    grids.validate()?;
    let (max_m, max_n) = grids.horizon;
    let prefix = build_prefix_tables(seq, p, q, max_m, max_n)?;
    let table = mean_table(&prefix, &cumulative(p, max_m)?, &cumulative(q, max_n)?, alpha_beta)?;
    lattice_convergence(table.values(), pair, limit, grids, &grids.t_grid)
}

/// Diameter of nested squares, valid for norms determined by coordinatewise
/// extremes. Slots per bucket: `2 * dim` (max of `x_c`, max of `-x_c`).
fn cauchy_by_diameter<F>(
    cell: F,
    dim: usize,
    norm_grades: fn(f64, f64) -> (f64, f64),
    grids: &Grids,
    t_grid: &[f64],
) -> Result<Vec<Vec<Grade>>>
where
    F: Fn(usize, usize, &mut [f64]) -> Result<()> + Sync,
{
    let slots = 2 * dim;
    let (max_m, max_n) = grids.horizon;
    let count = max_m.min(max_n) + 1;
    let table = stream_cells(grids.horizon, dim, count * slots, cell, |m, n, x, acc| {
        let s = m.min(n);
        let b = &mut acc[s * slots..(s + 1) * slots];
        for (c, &v) in x.iter().enumerate() {
            b[2 * c].offer(v, [m, n, 0, 0]);
            b[2 * c + 1].offer(-v, [m, n, 0, 0]);
        }
    })?;
    let mut suffix = vec![Peak::EMPTY; slots];
    let mut out = vec![Vec::new(); count];
    for s in (0..count).rev() {
        merge_peaks(&mut suffix, &table[s * slots..(s + 1) * slots]);
        let mut diam = 0.0;
        let mut key = None;
        for c in 0..dim {
            let (hi, lo) = (suffix[2 * c], suffix[2 * c + 1]);
            let d = hi.value + lo.value;
            if key.is_none() || d > diam {
                diam = d;
                key = Some([hi.at[0], hi.at[1], lo.at[0], lo.at[1]]);
            }
        }
        out[s] = t_grid
            .iter()
            .map(|&t| {
                let (mu, nu) = norm_grades(diam, t);
                Grade { mu, nu, at_mu: key, at_nu: key }
            })
            .collect();
    }
    Ok(out)
}

/// Exhaustive or sampled index pairs over a stored lattice.
fn cauchy_by_pairs(lattice: &Lattice, pair: &IFNormPair, grids: &Grids, t_grid: &[f64], seed: u64) -> (Vec<Vec<Grade>>, bool) {
    let grader = Grader::new(pair);
    let slots = grader.slots(t_grid.len());
    let (max_m, max_n) = grids.horizon;
    let count = max_m.min(max_n) + 1;
    let cols = max_n + 1;
    let cells = (max_m + 1) * cols;
    let total_pairs = cells * (cells - 1) / 2;
    let dim = lattice.dim();
    let mut table = vec![Peak::EMPTY; count * slots];
    let mut diff = vec![0.0; dim];
    let mut offer = |a: (usize, usize), b: (usize, usize), table: &mut [Peak]| {
        let (xa, xb) = (lattice.at(a.0, a.1), lattice.at(b.0, b.1));
        for c in 0..dim {
            diff[c] = xa[c] - xb[c];
        }
        let s = a.0.min(a.1).min(b.0).min(b.1);
        let (first, second) = if a <= b { (a, b) } else { (b, a) };
        grader.offer(&diff, [first.0, first.1, second.0, second.1], t_grid, &mut table[s * slots..(s + 1) * slots]);
    };
    let sampled = total_pairs > PAIR_CAP;
    if !sampled {
        for i in 0..cells {
            for l in i + 1..cells {
                offer((i / cols, i % cols), (l / cols, l % cols), &mut table);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let regions = [0, grids.tail_start, grids.mid_start()];
        for i in 0..PAIR_CAP {
            let lo = regions[i % 3];
            let pick = |rng: &mut ChaCha8Rng| (rng.random_range(lo..=max_m), rng.random_range(lo..=max_n));
            let a = pick(&mut rng);
            let b = pick(&mut rng);
            offer(a, b, &mut table);
        }
    }
    (squares_from_buckets(table, slots, &grader, t_grid), sampled)
}

/// Cauchy check over pairs of cells with all indices `>= n0`. For the
/// absolute and supremum norms (and any norm in dimension 1) the worst pair
/// is found exactly from coordinatewise extremes; otherwise at most
/// [`PAIR_CAP`] pairs are examined, drawn with `seed` when sampling is needed.
pub fn cauchy_verdict(seq: &DoubleSequence, pair: &IFNormPair, grids: &Grids, seed: u64) -> Result<Verdict> {
    grids.validate()?;
    check_dims(pair, seq.dim(), None)?;
    cauchy_on(|m, n, out| seq.eval_into(m, n, out), None, seq.dim(), pair, grids, &grids.t_grid, seed)
}

pub(crate) fn cauchy_on<F>(
    cell: F,
    stored: Option<&Lattice>,
    dim: usize,
    pair: &IFNormPair,
    grids: &Grids,
    t_grid: &[f64],
    seed: u64,
) -> Result<Verdict>
where
    F: Fn(usize, usize, &mut [f64]) -> Result<()> + Sync,
{
    let exact = pair.profile().filter(|p| p.norm.is_coordinate_separable() || dim == 1);
    let (squares, sampled) = match exact {
        Some(profile) => (cauchy_by_diameter(cell, dim, profile.grades, grids, t_grid)?, false),
        None => {
            let owned;
            let lattice = match stored {
                Some(l) => l,
                None => {
                    owned = Lattice::try_from_fn(grids.horizon.0, grids.horizon.1, dim, &cell)?;
                    &owned
                }
            };
            cauchy_by_pairs(lattice, pair, grids, t_grid, seed)
        }
    };
    Ok(verdict_from_squares(&squares, t_grid, grids, sampled, pair_witness))
}

/// Uniform grades over the whole lattice as `t` grows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QBoundedEstimate {
    pub status: Status,
    pub horizon: (usize, usize),
    /// `t_grid` extended by the large probe scales.
    pub t_values: Vec<f64>,
    pub inf_mu: Vec<f64>,
    pub sup_nu: Vec<f64>,
    /// Cell attaining the infimum at the largest `t`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

pub(crate) fn q_bounded_of<F>(cell: F, dim: usize, pair: &IFNormPair, grids: &Grids) -> Result<QBoundedEstimate>
where
    F: Fn(usize, usize, &mut [f64]) -> Result<()> + Sync,
{
    grids.validate()?;
    check_dims(pair, dim, None)?;
    let mut t_values = grids.t_grid.clone();
    for t in Q_BOUND_EXTRA_T {
        if t_values.last().is_none_or(|&last| t > last) {
            t_values.push(t);
        }
    }
    let grader = Grader::new(pair);
    let slots = grader.slots(t_values.len());
    let table = stream_cells(grids.horizon, dim, slots, cell, |m, n, x, acc| {
        grader.offer(x, [m, n, 0, 0], &t_values, acc)
    })?;
    let grades = grader.finish(&table, &t_values);
    let last = *grades.last().unwrap();
    let status = if last.mu >= 1.0 - Q_BOUND_TOLERANCE && last.nu <= Q_BOUND_TOLERANCE {
        Status::Holds
    } else {
        Status::Fails
    };
    let t_last = *t_values.last().unwrap();
    Ok(QBoundedEstimate {
        status,
        horizon: grids.horizon,
        inf_mu: grades.iter().map(|g| g.mu).collect(),
        sup_nu: grades.iter().map(|g| g.nu).collect(),
        witness: last.at_mu.map(|k| cell_witness(k, t_last, last.mu, last.nu)),
        t_values,
    })
}

/// `lim_{t→∞} inf_{m,n} μ(x_{mn}, t) = 1` and the `ν` analogue, over the
/// whole lattice.
pub fn q_bounded_estimate(seq: &DoubleSequence, pair: &IFNormPair, grids: &Grids) -> Result<QBoundedEstimate> {
    q_bounded_of(|m, n, out| seq.eval_into(m, n, out), seq.dim(), pair, grids)
}
