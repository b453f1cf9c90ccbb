//! Dense row-major matrix container, generic over the scalar.

use std::fmt;

use num_traits::Zero;

use crate::error::Error;

use super::elim::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, Error> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows_with_cols(rows, cols)
    }

    /// Like [`Matrix::from_rows`] but usable with an empty row list, where
    /// the column count cannot be inferred.
    pub fn from_rows_with_cols(rows: Vec<Vec<T>>, cols: usize) -> Result<Self, Error> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        let height = rows.len();
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::structure(format!(
                    "row {i} has length {}, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Ok(Matrix {
            rows: height,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub(crate) fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.entries.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool
    where
        T: PartialEq,
    {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            out.set(i, i, T::one());
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matmul");
        let mut out: Matrix<T> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let val = out.get(i, j).clone() + a.clone() * rhs.get(k, j).clone();
                    out.set(i, j, val);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matvec");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc + a.clone() * x.clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// `uᵀ · M · v`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> T {
        assert_eq!(self.rows, u.len());
        assert_eq!(self.cols, v.len());
        let mut acc = T::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (m, x) in self.row(i).iter().zip(v) {
                if !m.is_zero() && !x.is_zero() {
                    acc = acc + ui.clone() * m.clone() * x.clone();
                }
            }
        }
        acc
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale(&self, factor: &T) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|a| a.clone() * factor.clone())
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn trace(&self) -> T {
        assert_eq!(self.rows, self.cols, "trace of a non-square matrix");
        let mut acc = T::zero();
        for i in 0..self.rows {
            acc = acc + self.get(i, i).clone();
        }
        acc
    }

    /// Kronecker product, big-endian: the left factor owns the most
    /// significant index block.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Matrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = rhs.get(k, l);
                        if !b.is_zero() {
                            out.set(i * rhs.rows + k, j * rhs.cols + l, a.clone() * b.clone());
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(
                f,
                "  {:?}",
                &self.entries[i * self.cols..(i + 1) * self.cols]
            )?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::super::{rat, rvec};
    use crate::exactla::RMatrix;

    #[test]
    fn matmul_and_trace() {
        let a = RMatrix::from_rows(vec![rvec(&[1, 2]), rvec(&[3, 4])]).unwrap();
        let b = RMatrix::from_rows(vec![rvec(&[0, 1]), rvec(&[1, 0])]).unwrap();
        let ab = a.matmul(&b);
        assert_eq!(
            ab,
            RMatrix::from_rows(vec![rvec(&[2, 1]), rvec(&[4, 3])]).unwrap()
        );
        assert_eq!(ab.trace(), rat(5));
    }

    #[test]
    fn kron_big_endian() {
        let a = RMatrix::from_rows(vec![rvec(&[1, 0]), rvec(&[0, 2])]).unwrap();
        let b = RMatrix::identity(2);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(*k.get(0, 0), rat(1));
        assert_eq!(*k.get(2, 2), rat(2));
        assert_eq!(*k.get(3, 3), rat(2));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(RMatrix::from_rows(vec![rvec(&[1]), rvec(&[1, 2])]).is_err());
    }
}
