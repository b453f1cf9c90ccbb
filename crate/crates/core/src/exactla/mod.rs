//! Exact rational linear algebra: rank, kernel and solution-space
//! dimensions, with a fraction-free elimination kernel.
//!
//! The elimination routines are generic over the scalar type (see
//! [`Scalar`]); the toolkit instantiates them at arbitrary-precision
//! rationals, at big integers (the fraction-free default path) and at prime
//! fields (the optional residue fast path). The concrete aliases used
//! everywhere else in the crate are [`Rational`] and [`RMatrix`].

mod elim;
mod matrix;
pub mod modular;

pub use elim::{bareiss_echelon, Echelon, Scalar};
pub use matrix::Matrix;
pub use modular::rank_modular;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Exact rational scalar. Always stored reduced, with a positive
/// denominator; the canonical zero is 0/1.
pub type Rational = num_rational::BigRational;

/// Dense row-major matrix of rationals.
pub type RMatrix = Matrix<Rational>;

/// Rank of `m` over the rationals, computed exactly.
///
/// Rows are scaled to primitive integer vectors first, then reduced by
/// fraction-free (Bareiss) elimination so intermediate entries stay integral.
pub fn rank(m: &RMatrix) -> usize {
    bareiss_echelon(&integerize_rows(m)).rank()
}

/// Basis of the right null space of `m`.
///
/// Each basis vector is scaled to a primitive integer vector whose
/// free-column entry is positive, so the output is deterministic.
pub fn kernel_basis(m: &RMatrix) -> Vec<Vec<Rational>> {
    let echelon = bareiss_echelon(&integerize_rows(m));
    let cols = m.cols();
    let pivot_cols = echelon.pivot_cols.clone();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &pivot_cols {
            v[c] = true;
        }
        v
    };

    let mut basis = Vec::with_capacity(cols - pivot_cols.len());
    for free in (0..cols).filter(|c| !is_pivot[*c]) {
        let mut x = vec![Rational::zero(); cols];
        x[free] = Rational::one();
        // Back-substitute the pivot variables from the bottom pivot row up.
        #[allow(clippy::needless_range_loop)]
        for (row, &pc) in echelon.pivot_cols.iter().enumerate().rev() {
            let mut acc = Rational::zero();
            for c in (pc + 1)..cols {
                if !x[c].is_zero() {
                    acc += Rational::from(echelon.mat.get(row, c).clone()) * &x[c];
                }
            }
            x[pc] = -acc / Rational::from(echelon.mat.get(row, pc).clone());
        }
        normalize_primitive(&mut x);
        basis.push(x);
    }
    basis
}

/// Dimension of the solution space of `m·x = 0`, i.e. `cols − rank`.
pub fn solution_space_dim(m: &RMatrix) -> usize {
    m.cols() - rank(m)
}

/// Scale each row of a rational matrix to a primitive integer vector.
/// Row scaling by nonzero rationals leaves rank and kernel unchanged.
pub(crate) fn integerize_rows(m: &RMatrix) -> Matrix<BigInt> {
    let mut out = Matrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        let mut lcm = BigInt::one();
        for j in 0..m.cols() {
            lcm = lcm.lcm(m.get(i, j).denom());
        }
        let mut row: Vec<BigInt> = (0..m.cols())
            .map(|j| {
                let v = m.get(i, j);
                v.numer() * (&lcm / v.denom())
            })
            .collect();
        let mut gcd = BigInt::zero();
        for v in &row {
            gcd = gcd.gcd(v);
        }
        if !gcd.is_zero() && !gcd.is_one() {
            for v in &mut row {
                *v /= &gcd;
            }
        }
        for (j, v) in row.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    out
}

/// Scale a rational vector in place to coprime integers, keeping the sign
/// of every entry.
pub fn normalize_primitive(v: &mut [Rational]) {
    let mut lcm = BigInt::one();
    for x in v.iter() {
        lcm = lcm.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut gcd = BigInt::zero();
    for x in &ints {
        gcd = gcd.gcd(x);
    }
    if !gcd.is_zero() && !gcd.is_one() {
        for x in &mut ints {
            *x /= &gcd;
        }
    }
    for (slot, x) in v.iter_mut().zip(ints) {
        *slot = Rational::from(x);
    }
}

impl Scalar for Rational {
    fn pivot_weight(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }
}

impl Scalar for BigInt {
    fn pivot_weight(&self) -> u64 {
        self.bits()
    }
}

/// Convenience constructor for rationals from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Rational vector from integer literals.
pub fn rvec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&n| rat(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RMatrix {
        Matrix::from_rows(rows.iter().map(|r| rvec(r)).collect()).unwrap()
    }

    #[test]
    fn rank_identity_and_zero() {
        assert_eq!(rank(&Matrix::identity(3)), 3);
        assert_eq!(rank(&Matrix::zeros(4, 4)), 0);
    }

    #[test]
    fn rank_dependent_rows() {
        assert_eq!(rank(&m(&[&[1, 1, 0], &[2, 2, 0]])), 1);
    }

    #[test]
    fn kernel_full_rank_is_empty() {
        assert!(kernel_basis(&Matrix::identity(3)).is_empty());
    }

    #[test]
    fn kernel_of_difference_row() {
        let basis = kernel_basis(&m(&[&[1, -1]]));
        assert_eq!(basis, vec![rvec(&[1, 1])]);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let mat = m(&[&[1, 2, 3], &[4, 5, 6], &[5, 7, 9]]);
        let basis = kernel_basis(&mat);
        assert_eq!(basis.len(), 1);
        for v in &basis {
            assert!(mat.matvec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solution_dims() {
        assert_eq!(solution_space_dim(&Matrix::identity(5)), 0);
        assert_eq!(solution_space_dim(&Matrix::zeros(3, 7)), 7);
        assert_eq!(solution_space_dim(&m(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn empty_shapes() {
        assert_eq!(rank(&Matrix::zeros(0, 4)), 0);
        assert_eq!(kernel_basis(&Matrix::zeros(0, 3)).len(), 3);
        assert_eq!(kernel_basis(&Matrix::zeros(3, 0)).len(), 0);
    }

    #[test]
    fn primitive_normalization() {
        let mut v = vec![
            Rational::new(BigInt::from(2), BigInt::from(3)),
            Rational::new(BigInt::from(-4), BigInt::from(3)),
        ];
        normalize_primitive(&mut v);
        assert_eq!(v, rvec(&[1, -2]));
    }
}
