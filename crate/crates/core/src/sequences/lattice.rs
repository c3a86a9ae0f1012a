use rayon::prelude::*;

use super::{cumulative, CumulativeWeights, DoubleSequence, WeightSequence};
use crate::{Error, EvalFailure, Result};

/// Dense `(M+1) x (N+1)` table of vectors in `R^dim`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    rows: usize,
    cols: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Lattice {
    pub fn zeros(max_m: usize, max_n: usize, dim: usize) -> Self {
        let (rows, cols) = (max_m + 1, max_n + 1);
        Lattice { rows, cols, dim, data: vec![0.0; rows * cols * dim] }
    }

    /// Fills every cell from `f`; rows are evaluated in parallel, the first
    /// failing row (in index order) determines the error.
    pub fn try_from_fn<F>(max_m: usize, max_n: usize, dim: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize, &mut [f64]) -> Result<()> + Sync,
    {
        let mut lattice = Self::zeros(max_m, max_n, dim);
        let row_len = lattice.cols * dim;
        let outcomes: Vec<Result<()>> = lattice
            .data
            .par_chunks_mut(row_len)
            .enumerate()
            .map(|(m, row)| {
                for (n, cell) in row.chunks_mut(dim).enumerate() {
                    f(m, n, cell)?;
                }
                Ok(())
            })
            .collect();
        outcomes.into_iter().collect::<Result<Vec<()>>>()?;
        Ok(lattice)
    }

    pub fn from_fn<F>(max_m: usize, max_n: usize, dim: usize, f: F) -> Self
    where
        F: Fn(usize, usize, &mut [f64]) + Sync,
    {
        Self::try_from_fn(max_m, max_n, dim, |m, n, out| {
            f(m, n, out);
            Ok(())
        })
        .expect("infallible fill")
    }

    /// Samples `seq` on `[0, max_m] x [0, max_n]`.
    pub fn sample(seq: &DoubleSequence, max_m: usize, max_n: usize) -> Result<Self> {
        Self::try_from_fn(max_m, max_n, seq.dim(), |m, n, out| seq.eval_into(m, n, out))
    }

    /// `(M, N)`: the largest indices stored.
    pub fn horizon(&self) -> (usize, usize) {
        (self.rows - 1, self.cols - 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, m: usize, n: usize) -> &[f64] {
        let i = (m * self.cols + n) * self.dim;
        &self.data[i..i + self.dim]
    }

    #[inline]
    pub fn at_mut(&mut self, m: usize, n: usize) -> &mut [f64] {
        let i = (m * self.cols + n) * self.dim;
        &mut self.data[i..i + self.dim]
    }

    /// Row `m` as a flat slice of `(N+1) * dim` values.
    #[inline]
    pub fn row(&self, m: usize) -> &[f64] {
        let len = self.cols * self.dim;
        &self.data[m * len..(m + 1) * len]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// First cell (row-major) holding a non-finite coordinate.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.data.iter().position(|v| !v.is_finite()).map(|i| {
            let cell = i / self.dim;
            (cell / self.cols, cell % self.cols)
        })
    }

    fn ensure_finite(&self) -> Result<()> {
        match self.first_non_finite() {
            Some((m, n)) => Err(Error::Evaluation { m, n, kind: EvalFailure::NonFinite }),
            None => Ok(()),
        }
    }
}

/// Weighted 2D prefix sums of a sampled lattice.
///
/// - `double(m,n) = sum_{j<=m} sum_{k<=n} p_j q_k x_{jk}`
/// - `rows(m,n)   = sum_{j<=m} p_j x_{jn}` (prefix down column `n`)
/// - `cols(m,n)   = sum_{k<=n} q_k x_{mk}` (prefix along row `m`)
///
/// Every table is accumulated in ascending index order, so results are
/// bit-identical for any thread count.
#[derive(Debug, Clone)]
pub struct PrefixTable {
    values: Lattice,
    double: Lattice,
    rows: Lattice,
    cols: Lattice,
}

impl PrefixTable {
    pub fn build(values: Lattice, p: &CumulativeWeights, q: &CumulativeWeights) -> Result<Self> {
        let (max_m, max_n) = values.horizon();
        if p.horizon() < max_m || q.horizon() < max_n {
            return Err(Error::OutOfRange { m: max_m, n: max_n, max_m: p.horizon(), max_n: q.horizon() });
        }
        let dim = values.dim();
        let row_len = (max_n + 1) * dim;

        let mut cols = Lattice::zeros(max_m, max_n, dim);
        cols.data.par_chunks_mut(row_len).enumerate().for_each(|(m, out)| {
            let src = values.row(m);
            let mut acc = vec![0.0; dim];
            for n in 0..=max_n {
                let qn = q.weight(n);
                for d in 0..dim {
                    acc[d] += qn * src[n * dim + d];
                    out[n * dim + d] = acc[d];
                }
            }
        });

        let mut double = Lattice::zeros(max_m, max_n, dim);
        let mut rows = Lattice::zeros(max_m, max_n, dim);
        for m in 0..=max_m {
            let pm = p.weight(m);
            let base = m * row_len;
            for i in 0..row_len {
                let (prev_d, prev_r) = if m == 0 {
                    (0.0, 0.0)
                } else {
                    (double.data[base - row_len + i], rows.data[base - row_len + i])
                };
                double.data[base + i] = prev_d + pm * cols.data[base + i];
                rows.data[base + i] = prev_r + pm * values.data[base + i];
            }
        }

        for table in [&cols, &double, &rows] {
            table.ensure_finite()?;
        }
        Ok(PrefixTable { values, double, rows, cols })
    }

    /// The sampled sequence the tables were built from.
    pub fn values(&self) -> &Lattice {
        &self.values
    }

    pub fn horizon(&self) -> (usize, usize) {
        self.values.horizon()
    }

    pub fn dim(&self) -> usize {
        self.values.dim()
    }

    pub fn double(&self) -> &Lattice {
        &self.double
    }

    pub fn row_prefix(&self) -> &Lattice {
        &self.rows
    }

    pub fn col_prefix(&self) -> &Lattice {
        &self.cols
    }

    /// `sum_{a<j<=b} sum_{c<k<=d} p_j q_k x_{jk}`; `a` and `c` may be `-1`.
    pub fn window_sum(&self, a: isize, b: usize, c: isize, d: usize, out: &mut [f64]) {
        let s = &self.double;
        for (i, o) in out.iter_mut().enumerate() {
            let mut v = s.at(b, d)[i];
            if a >= 0 {
                v -= s.at(a as usize, d)[i];
            }
            if c >= 0 {
                v -= s.at(b, c as usize)[i];
            }
            if a >= 0 && c >= 0 {
                v += s.at(a as usize, c as usize)[i];
            }
            *o = v;
        }
    }

    /// `sum_{a<j<=b} p_j x_{jn}`.
    pub fn row_strip_sum(&self, a: isize, b: usize, n: usize, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut v = self.rows.at(b, n)[i];
            if a >= 0 {
                v -= self.rows.at(a as usize, n)[i];
            }
            *o = v;
        }
    }

    /// `sum_{c<k<=d} q_k x_{mk}`.
    pub fn col_strip_sum(&self, m: usize, c: isize, d: usize, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut v = self.cols.at(m, d)[i];
            if c >= 0 {
                v -= self.cols.at(m, c as usize)[i];
            }
            *o = v;
        }
    }
}

/// Samples `seq` and builds its prefix tables on `[0, M] x [0, N]`.
pub fn build_prefix_tables(
    seq: &DoubleSequence,
    p: &WeightSequence,
    q: &WeightSequence,
    max_m: usize,
    max_n: usize,
) -> Result<PrefixTable> {
    let values = Lattice::sample(seq, max_m, max_n)?;
    PrefixTable::build(values, &cumulative(p, max_m)?, &cumulative(q, max_n)?)
}
