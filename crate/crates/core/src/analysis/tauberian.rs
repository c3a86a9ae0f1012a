use rayon::prelude::*;

use super::{merge_peaks, ConditionEstimate, Grader, Grids, Key, LambdaResult, Peak, Witness};
use crate::ifn::IFNormPair;
use crate::means::{Variant, Window};
use crate::sequences::{build_prefix_tables, cumulative, CumulativeWeights, DoubleSequence, PrefixTable, WeightSequence};
use crate::{Error, Result};

pub(crate) fn tauberian_on(
    prefix: &PrefixTable,
    p: &CumulativeWeights,
    q: &CumulativeWeights,
    pair: &IFNormPair,
    variant: Variant,
    grids: &Grids,
    t_grid: &[f64],
) -> Result<ConditionEstimate> {
    grids.validate()?;
    if pair.dim() != prefix.dim() {
        return Err(Error::DimensionMismatch { expected: pair.dim(), actual: prefix.dim() });
    }
    let (max_m, max_n) = grids.horizon;
    let (pm, pn) = prefix.horizon();
    if pm < max_m || pn < max_n {
        return Err(Error::OutOfRange { m: max_m, n: max_n, max_m: pm, max_n: pn });
    }
    let grader = Grader::new(pair);
    let slots = grader.slots(t_grid.len());
    let dim = prefix.dim();
    let tail = grids.tail_start;
    let lambdas = if variant.is_gt1() { &grids.lambda_gt1 } else { &grids.lambda_lt1 };
    let results = lambdas
        .iter()
        .map(|&lambda| {
            let (table, anchors, skipped) = (tail..=max_m)
                .into_par_iter()
                .fold(
                    || (vec![Peak::EMPTY; slots], 0usize, 0usize, vec![0.0; dim]),
                    |(mut acc, mut used, mut skipped, mut out), m| {
                        for n in tail..=max_n {
                            let value = Window::new(variant, m, n, lambda, (max_m, max_n))
                                .and_then(|w| w.value_into(prefix, p, q, &mut out));
                            match value {
                                Ok(()) => {
                                    used += 1;
                                    grader.offer(&out, [m, n, 0, 0], t_grid, &mut acc);
                                }
                                Err(_) => skipped += 1,
                            }
                        }
                        (acc, used, skipped, out)
                    },
                )
                .map(|(acc, used, skipped, _)| (acc, used, skipped))
                .reduce(
                    || (vec![Peak::EMPTY; slots], 0, 0),
                    |(mut a, ua, sa), (b, ub, sb)| {
                        merge_peaks(&mut a, &b);
                        (a, ua + ub, sa + sb)
                    },
                );
            LambdaResult { lambda, grades: grader.finish(&table, t_grid), anchors, skipped, sampled: false }
        })
        .collect();
    Ok(ConditionEstimate::assemble(
        format!("tauberian {variant}"),
        &Grids { t_grid: t_grid.to_vec(), ..grids.clone() },
        results,
        anchor_witness,
    ))
}

fn anchor_witness(key: Key, lambda: f64, t: f64, mu: f64, nu: f64) -> Witness {
    Witness { m: key[0], n: key[1], j: None, k: None, lambda: Some(lambda), t, mu, nu }
}

/// Tail minimum of `μ(window mean, t)` (and maximum of `ν`) over anchors in
/// the tail square, per `(λ, t)`, for the given window variant. Degenerate,
/// out-of-horizon and flat-weight windows are skipped and counted.
pub fn tauberian_condition(
    seq: &DoubleSequence,
    pair: &IFNormPair,
    p: &WeightSequence,
    q: &WeightSequence,
    variant: Variant,
    grids: &Grids,
) -> Result<ConditionEstimate> {
    grids.validate()?;
    let (max_m, max_n) = grids.horizon;
    let prefix = build_prefix_tables(seq, p, q, max_m, max_n)?;
    tauberian_on(&prefix, &cumulative(p, max_m)?, &cumulative(q, max_n)?, pair, variant, grids, &grids.t_grid)
}
