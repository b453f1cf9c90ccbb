//! Fraction-free (Bareiss) elimination, generic over the scalar.
//!
//! Over an integral domain the Bareiss update keeps every intermediate entry
//! equal to a minor of the input (up to sign), so the division by the
//! previous pivot is always exact and integer inputs stay integer. Over a
//! field the same routine degenerates to ordinary elimination.

use std::fmt::Debug;
use std::ops::{Div, Neg, Sub};

use num_traits::{One, Zero};

use super::matrix::Matrix;

/// Scalar admissible for elimination.
///
/// `Zero`/`One` bring `Add`/`Mul`; the rest is subtraction, negation and the
/// exact division required by the fraction-free update. `pivot_weight` is the
/// measure minimized by pivot selection (total bit length for big numbers,
/// constant for fixed-width fields, so there it falls back to lowest row).
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
{
    fn pivot_weight(&self) -> u64;
}

/// Result of a forward elimination: a row-echelon matrix with the same row
/// space (hence the same right kernel) as the input, plus its pivot columns.
pub struct Echelon<T> {
    pub mat: Matrix<T>,
    pub pivot_cols: Vec<usize>,
}

impl<T> Echelon<T> {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }
}

/// Fraction-free forward elimination with row pivoting.
///
/// In each column the pivot is the nonzero candidate with the smallest
/// `pivot_weight`, ties broken by the lowest row index, which keeps results
/// reproducible and limits coefficient growth.
pub fn bareiss_echelon<T: Scalar>(m: &Matrix<T>) -> Echelon<T> {
    let mut work = m.clone();
    let (rows, cols) = (work.rows(), work.cols());
    let mut pivot_cols = Vec::new();
    let mut prev = T::one();
    let mut r = 0;

    for c in 0..cols {
        if r == rows {
            break;
        }
        let pivot_row = (r..rows)
            .filter(|&i| !work.get(i, c).is_zero())
            .min_by_key(|&i| (work.get(i, c).pivot_weight(), i));
        let Some(pivot_row) = pivot_row else {
            continue;
        };
        work.swap_rows(r, pivot_row);

        let pivot = work.get(r, c).clone();
        for i in (r + 1)..rows {
            let lead = work.get(i, c).clone();
            for j in (c + 1)..cols {
                let num =
                    pivot.clone() * work.get(i, j).clone() - lead.clone() * work.get(r, j).clone();
                work.set(i, j, num / prev.clone());
            }
            work.set(i, c, T::zero());
        }
        prev = pivot;
        pivot_cols.push(c);
        r += 1;
    }

    Echelon {
        mat: work,
        pivot_cols,
    }
}
