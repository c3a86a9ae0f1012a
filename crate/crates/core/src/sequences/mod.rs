//! Double sequences, weight sequences, sampled lattices and prefix tables.

pub mod expr;
mod lattice;
mod transform;
mod weights;

use std::fmt;
use std::sync::Arc;

use crate::{Error, EvalFailure, Result, Vector};

pub use lattice::{build_prefix_tables, Lattice, PrefixTable};
pub use transform::{difference_transform, Axis, Scaling};
pub use weights::{cumulative, CumulativeWeights, WeightSequence, DIVERGENCE_FACTOR};

type CellFn = dyn Fn(usize, usize, &mut [f64]) -> std::result::Result<(), EvalFailure> + Send + Sync;

/// A pure map `(m, n) -> R^d`.
///
/// Evaluation is deterministic: the same `(m, n)` always yields bit-identical
/// output. Cloning shares the underlying closure.
#[derive(Clone)]
pub struct DoubleSequence {
    descriptor: String,
    dim: usize,
    eval: Arc<CellFn>,
}

impl fmt::Debug for DoubleSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DoubleSequence")
            .field("descriptor", &self.descriptor)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl DoubleSequence {
    /// Wraps a closure writing `x_{mn}` into its output slice.
    pub fn from_fn<F>(descriptor: impl Into<String>, dim: usize, f: F) -> Self
    where
        F: Fn(usize, usize, &mut [f64]) -> std::result::Result<(), EvalFailure> + Send + Sync + 'static,
    {
        DoubleSequence { descriptor: descriptor.into(), dim: dim.max(1), eval: Arc::new(f) }
    }

    /// Scalar convenience constructor.
    pub fn scalar<F>(descriptor: impl Into<String>, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Send + Sync + 'static,
    {
        Self::from_fn(descriptor, 1, move |m, n, out| {
            out[0] = f(m, n);
            Ok(())
        })
    }

    pub fn constant(value: Vector) -> Self {
        let descriptor = format!("constant {value}");
        let dim = value.dim();
        Self::from_fn(descriptor, dim, move |_, _, out| {
            out.copy_from_slice(&value);
            Ok(())
        })
    }

    /// Named sequences accepted wherever an expression is.
    pub fn builtin(name: &str) -> Option<Self> {
        let text = match name {
            "zero" => "0",
            "alternating" => "alt(m+n)",
            "reciprocal" => "1/(m+n+1)",
            "harmonic" => "harm(m)+harm(n)",
            _ => return None,
        };
        compile_expression(text).ok().map(|s| s.with_descriptor(name))
    }

    pub fn with_descriptor(mut self, descriptor: impl Into<String>) -> Self {
        self.descriptor = descriptor.into();
        self
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes `x_{mn}` into `out` (length `dim`).
    #[inline]
    pub fn eval_into(&self, m: usize, n: usize, out: &mut [f64]) -> Result<()> {
        (self.eval)(m, n, out).map_err(|kind| Error::Evaluation { m, n, kind })?;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Evaluation { m, n, kind: EvalFailure::NonFinite });
        }
        Ok(())
    }

    pub fn eval(&self, m: usize, n: usize) -> Result<Vector> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(m, n, &mut out)?;
        Vector::new(out)
    }
}

/// Compiles an expression in `m`, `n` into a sequence. A top-level tuple
/// `(e1, ..., ed)` gives a sequence in `R^d`.
pub fn compile_expression(text: &str) -> Result<DoubleSequence> {
    let compiled = expr::compile(text, &["m", "n"])?;
    let dim = compiled.dim();
    Ok(DoubleSequence::from_fn(text.to_string(), dim, move |m, n, out| {
        compiled.eval_into(&[m as f64, n as f64], out)
    }))
}

/// Resolves a builtin name first, then falls back to the expression language.
pub fn sequence_from_text(text: &str) -> Result<DoubleSequence> {
    match DoubleSequence::builtin(text.trim()) {
        Some(seq) => Ok(seq),
        None => compile_expression(text),
    }
}
