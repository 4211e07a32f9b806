//! Small dense column-major matrix used for targets, materialized codebooks
//! and exact reconstructions.

use std::ops::{Add, Mul};

use num_traits::Zero;

use crate::error::{dim, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim(format!("{} values for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: &[T]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim(format!("{} values for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix::from_fn(rows, cols, |i, j| data[i * cols + j].clone()))
    }

    pub fn from_columns(rows: usize, columns: Vec<Vec<T>>) -> Result<Self> {
        let cols = columns.len();
        if columns.iter().any(|c| c.len() != rows) {
            return Err(dim("ragged column list"));
        }
        Ok(Matrix { rows, cols, data: columns.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.rows + i] = v;
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        (0..self.cols).map(move |j| self.column(j))
    }

    pub fn as_col_major(&self) -> &[T] {
        &self.data
    }

    pub fn row_major(&self) -> Vec<T> {
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Matrix made of the given columns, in order.
    /// The leading `n` rows.
    pub fn select_rows(&self, n: usize) -> Matrix<T> {
        Matrix::from_fn(n, self.cols, |i, j| self.get(i, j).clone())
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: idx.len(),
            data: idx.iter().flat_map(|&j| self.column(j).iter().cloned()).collect(),
        }
    }

    /// Dense reference product; used by oracles and reconstruction checks.
    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>>
    where
        T: Zero,
        for<'a> &'a T: Mul<&'a T, Output = T> + Add<&'a T, Output = T>,
    {
        if x.len() != self.cols {
            return Err(dim(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        let mut y = vec![T::zero(); self.rows];
        for (j, xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for (yi, a) in y.iter_mut().zip(self.column(j)) {
                *yi = &*yi + &(a * xj);
            }
        }
        Ok(y)
    }
}

impl<F: Real> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn frobenius_sq(&self) -> F {
        self.data.iter().map(|&v| v * v).sum()
    }

    pub fn scaled(&self, s: F) -> Self {
        self.map(|&v| v * s)
    }

    /// `‖self − other‖²_F`.
    pub fn distance_sq(&self, other: &Matrix<F>) -> Result<F> {
        if self.shape() != other.shape() {
            return Err(dim(format!("{:?} vs {:?}", self.shape(), other.shape())));
        }
        Ok(self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b) * (a - b)).sum())
    }

    pub fn cast<G: Real>(&self) -> Matrix<G> {
        self.map(|&v| G::from(v).expect("finite value"))
    }
}

pub(crate) fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn norm_sq<F: Real>(a: &[F]) -> F {
    dot(a, a)
}
