use rayon::prelude::*;

use crate::error::{dim, domain, Result};
use crate::matrix::Matrix;
use crate::pot_arith::{Dyadic, SignedPow2};
use crate::scalar::{Real, ShiftAdd};

/// One stored nonzero of a [`Pow2Matrix`] column.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Entry {
    pub row: usize,
    pub coeff: SignedPow2,
}

/// Operation tally of a shift-add evaluation.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct OpCount {
    pub additions: u64,
    pub shifts: u64,
    pub negations: u64,
}

impl std::ops::AddAssign for OpCount {
    fn add_assign(&mut self, o: OpCount) {
        self.additions += o.additions;
        self.shifts += o.shifts;
        self.negations += o.negations;
    }
}

/// Sparse matrix whose nonzeros are signed powers of two, stored by column.
///
/// Row indices are strictly increasing within a column and every stored
/// coefficient is nonzero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Pow2Matrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<Entry>>,
}

impl Pow2Matrix {
    pub fn new(rows: usize, columns: Vec<Vec<Entry>>) -> Result<Self> {
        for (j, col) in columns.iter().enumerate() {
            if col.iter().any(|e| e.coeff.is_zero()) {
                return Err(domain(format!("column {j} stores a zero coefficient")));
            }
            if col.windows(2).any(|w| w[0].row >= w[1].row) {
                return Err(domain(format!("column {j} rows are not strictly increasing")));
            }
            if col.last().is_some_and(|e| e.row >= rows) {
                return Err(domain(format!("column {j} has a row index out of bounds")));
            }
        }
        Ok(Pow2Matrix { rows, cols: columns.len(), columns })
    }

    /// Builds from unordered `(row, coeff)` lists, dropping zeros.
    pub fn from_unsorted(rows: usize, columns: Vec<Vec<(usize, SignedPow2)>>) -> Result<Self> {
        let columns = columns
            .into_iter()
            .map(|mut c| {
                c.retain(|(_, v)| !v.is_zero());
                c.sort_by_key(|&(r, _)| r);
                c.into_iter().map(|(row, coeff)| Entry { row, coeff }).collect()
            })
            .collect();
        Pow2Matrix::new(rows, columns)
    }

    pub fn identity(n: usize) -> Self {
        let columns = (0..n).map(|j| vec![Entry { row: j, coeff: SignedPow2::ONE }]).collect();
        Pow2Matrix { rows: n, cols: n, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[Entry] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<Entry>] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn negative_count(&self) -> usize {
        self.columns.iter().flatten().filter(|e| e.coeff.is_negative()).count()
    }

    /// Additions under the per-column convention: each column sums its
    /// terms, `Σ_j max(nnz_j − 1, 0)`. Equals `nnz − cols` when no column
    /// is empty.
    pub fn column_additions(&self) -> u64 {
        self.columns.iter().map(|c| c.len().saturating_sub(1) as u64).sum()
    }

    /// Additions actually executed by [`apply`](Self::apply): every output row
    /// sums its terms, `nnz − #nonempty rows`.
    pub fn row_additions(&self) -> u64 {
        let mut used = vec![false; self.rows];
        for e in self.columns.iter().flatten() {
            used[e.row] = true;
        }
        (self.nnz() - used.iter().filter(|&&u| u).count()) as u64
    }

    pub fn structural_ops(&self) -> OpCount {
        OpCount {
            additions: self.row_additions(),
            shifts: self.nnz() as u64,
            negations: self.negative_count() as u64,
        }
    }

    pub fn to_dense<F: Real>(&self) -> Matrix<F> {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (j, col) in self.columns.iter().enumerate() {
            for e in col {
                m.set(e.row, j, e.coeff.value());
            }
        }
        m
    }

    pub fn to_dyadic(&self) -> Matrix<Dyadic> {
        let mut m = Matrix::from_fn(self.rows, self.cols, |_, _| Dyadic::from_i64(0));
        for (j, col) in self.columns.iter().enumerate() {
            for e in col {
                m.set(e.row, j, e.coeff.to_dyadic());
            }
        }
        m
    }

    /// `self · x` with shifts, negations and additions only. Additions of a
    /// term into an empty accumulator are free, so the count is structural:
    /// it equals [`row_additions`](Self::row_additions) for every `x`.
    pub fn apply<S: ShiftAdd>(&self, x: &[S]) -> Result<(Vec<S>, OpCount)> {
        if x.len() != self.cols {
            return Err(dim(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        let mut acc: Vec<Option<S>> = vec![None; self.rows];
        let mut ops = OpCount::default();
        for (col, xj) in self.columns.iter().zip(x) {
            for e in col {
                let term = e.coeff.apply(xj);
                ops.shifts += 1;
                if e.coeff.is_negative() {
                    ops.negations += 1;
                }
                let slot = &mut acc[e.row];
                *slot = Some(match slot.take() {
                    None => term,
                    Some(a) => {
                        ops.additions += 1;
                        a + term
                    }
                });
            }
        }
        let y = acc.into_iter().map(|a| a.unwrap_or_else(S::zero)).collect();
        Ok((y, ops))
    }

    /// `m · self`: each output column is a shift-add combination of columns
    /// of `m`.
    pub fn left_mul<S>(&self, m: &Matrix<S>) -> Result<Matrix<S>>
    where
        S: ShiftAdd + Send + Sync,
    {
        if m.cols() != self.rows {
            return Err(dim(format!(
                "{}x{} times {}x{}",
                m.rows(),
                m.cols(),
                self.rows,
                self.cols
            )));
        }
        let n = m.rows();
        let columns: Vec<Vec<S>> = self
            .columns
            .par_iter()
            .map(|col| {
                let mut out = vec![S::zero(); n];
                for e in col {
                    for (o, v) in out.iter_mut().zip(m.column(e.row)) {
                        *o = o.clone() + e.coeff.apply(v);
                    }
                }
                out
            })
            .collect();
        Matrix::from_columns(n, columns)
    }

    /// Reorders columns: output column `c` is input column `idx[c]`.
    pub fn select_columns(&self, idx: &[usize]) -> Pow2Matrix {
        Pow2Matrix {
            rows: self.rows,
            cols: idx.len(),
            columns: idx.iter().map(|&j| self.columns[j].clone()).collect(),
        }
    }
}
