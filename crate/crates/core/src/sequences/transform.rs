use std::sync::{Arc, RwLock};

use super::{DoubleSequence, WeightSequence};
use crate::{Error, EvalFailure, Result};

/// Index along which a difference is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    M,
    N,
}

/// Factor applied to the backward difference.
#[derive(Debug, Clone)]
pub enum Scaling {
    None,
    /// Multiply by the differenced index (`m` or `n`).
    Index,
    /// Multiply by `P_m / p_m` for the given weights.
    Weighted(WeightSequence),
}

/// How far non-strictly-positive weights are scanned for a zero to report.
const ZERO_SEARCH: usize = 1 << 16;

/// Lazily extended `P_m`, always accumulated from index 0 upward so every
/// value is bit-identical no matter which thread extended the table.
struct LazySums {
    weights: WeightSequence,
    sums: RwLock<Vec<f64>>,
}

impl LazySums {
    fn ratio(&self, m: usize) -> f64 {
        let p = self.weights.weight(m);
        {
            let sums = self.sums.read().unwrap();
            if let Some(&s) = sums.get(m) {
                return s / p;
            }
        }
        let mut sums = self.sums.write().unwrap();
        while sums.len() <= m {
            let j = sums.len();
            let prev = sums.last().copied().unwrap_or(0.0);
            sums.push(prev + self.weights.weight(j));
        }
        sums[m] / p
    }
}

/// Backward difference `scale * (x_{mn} - x_{m-1,n})` (or along `n`), with
/// `θ` at index 0 of the differenced axis.
pub fn difference_transform(seq: &DoubleSequence, axis: Axis, scaling: Scaling) -> Result<DoubleSequence> {
    let scale: Arc<dyn Fn(usize) -> f64 + Send + Sync> = match scaling {
        Scaling::None => Arc::new(|_| 1.0),
        Scaling::Index => Arc::new(|i| i as f64),
        Scaling::Weighted(w) => {
            if !w.is_strictly_positive() {
                return Err(match (0..=ZERO_SEARCH).map(|j| (j, w.weight(j))).find(|(_, v)| !(*v > 0.0)) {
                    Some((index, value)) => Error::NonPositiveWeight { index, value },
                    None => Error::InvalidWeights(format!(
                        "weights must be strictly positive; `{}` is not known to be",
                        w.descriptor()
                    )),
                });
            }
            let lazy = LazySums { weights: w, sums: RwLock::new(Vec::new()) };
            Arc::new(move |i| lazy.ratio(i))
        }
    };
    let label = match axis {
        Axis::M => "dm",
        Axis::N => "dn",
    };
    let descriptor = format!("{label}[{}]", seq.descriptor());
    let dim = seq.dim();
    let inner = seq.clone();
    Ok(DoubleSequence::from_fn(descriptor, dim, move |m, n, out| {
        let (i, prev) = match axis {
            Axis::M => (m, m.checked_sub(1).map(|pm| (pm, n))),
            Axis::N => (n, n.checked_sub(1).map(|pn| (m, pn))),
        };
        let Some((pm, pn)) = prev else {
            out.fill(0.0);
            return Ok(());
        };
        let mut before = vec![0.0; out.len()];
        inner.eval_into(m, n, out).map_err(failure)?;
        inner.eval_into(pm, pn, &mut before).map_err(failure)?;
        let s = scale(i);
        for (o, b) in out.iter_mut().zip(&before) {
            *o = s * (*o - b);
        }
        Ok(())
    }))
}

fn failure(e: Error) -> EvalFailure {
    match e {
        Error::Evaluation { kind, .. } => kind,
        _ => EvalFailure::NonFinite,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::compile_expression;

    #[test]
    fn constant_differences_vanish() {
        let c = compile_expression("(3, -2)").unwrap();
        for axis in [Axis::M, Axis::N] {
            for scaling in [Scaling::None, Scaling::Index, Scaling::Weighted(WeightSequence::linear())] {
                let d = difference_transform(&c, axis, scaling).unwrap();
                for (m, n) in [(0, 0), (1, 4), (7, 3)] {
                    assert!(d.eval(m, n).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn index_scaled_differences() {
        let x = compile_expression("m+n").unwrap();
        let d = difference_transform(&x, Axis::M, Scaling::Index).unwrap();
        assert_eq!(d.eval(5, 2).unwrap()[0], 5.0);
        assert_eq!(d.eval(0, 2).unwrap()[0], 0.0);
        let h = compile_expression("harm(m)").unwrap();
        let d = difference_transform(&h, Axis::M, Scaling::Index).unwrap();
        for m in 1..50 {
            assert!((d.eval(m, 3).unwrap()[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_scaling() {
        let x = compile_expression("m*m + n").unwrap();
        let d = difference_transform(&x, Axis::M, Scaling::Weighted(WeightSequence::linear())).unwrap();
        // P_3 / p_3 = 10 / 4, difference 9 - 4 = 5
        assert_eq!(d.eval(3, 1).unwrap()[0], 12.5);
        let dn = difference_transform(&x, Axis::N, Scaling::None).unwrap();
        assert_eq!(dn.eval(3, 1).unwrap()[0], 1.0);
    }

    #[test]
    fn zero_weights_rejected() {
        let x = compile_expression("m").unwrap();
        let w = WeightSequence::from_slice(&[1.0, 2.0]).unwrap();
        let err = difference_transform(&x, Axis::M, Scaling::Weighted(w)).unwrap_err();
        assert_eq!(err, Error::NonPositiveWeight { index: 2, value: 0.0 });
        assert!(err.to_string().contains("weights must be strictly positive"));
    }
}
