//! Residue-arithmetic rank fast path.
//!
//! The rank over Z/p never exceeds the rational rank, and equals it unless p
//! divides an unlucky minor. The fast path therefore runs the same
//! elimination kernel over several prime fields and accepts the result only
//! when all primes agree; on disagreement it falls back to the exact
//! fraction-free path.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::elim::{bareiss_echelon, Scalar};
use super::matrix::Matrix;
use super::{integerize_rows, RMatrix};

/// Primes used by the multi-prime confirmation.
pub const RANK_PRIMES: [u64; 3] = [998_244_353, 1_000_000_007, 1_000_000_009];

/// Element of the prime field Z/P.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(v: u64) -> Self {
        Fp(v % P)
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        let p = BigInt::from(P);
        let mut r = v % &p;
        if r.is_negative() {
            r += &p;
        }
        Fp(r.to_u64().expect("residue fits in u64"))
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::<P>(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    fn inv(self) -> Self {
        assert!(self.0 != 0, "division by zero in Fp");
        self.pow(P - 2)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let s = self.0 + rhs.0;
        Fp(if s >= P { s - P } else { s })
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Fp(if self.0 >= rhs.0 {
            self.0 - rhs.0
        } else {
            self.0 + P - rhs.0
        })
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv()
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp(if self.0 == 0 { 0 } else { P - self.0 })
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1)
    }
}

impl<const P: u64> Scalar for Fp<P> {
    fn pivot_weight(&self) -> u64 {
        1
    }
}

fn rank_mod<const P: u64>(int: &Matrix<BigInt>) -> usize {
    let mut m: Matrix<Fp<P>> = Matrix::zeros(int.rows(), int.cols());
    for i in 0..int.rows() {
        for j in 0..int.cols() {
            m.set(i, j, Fp::<P>::from_bigint(int.get(i, j)));
        }
    }
    bareiss_echelon(&m).rank()
}

/// Rank of `m` via the residue fast path: agreement over the primes in
/// [`RANK_PRIMES`] accepts the modular answer, otherwise the exact
/// fraction-free elimination decides.
pub fn rank_modular(m: &RMatrix) -> usize {
    let int = integerize_rows(m);
    let r0 = rank_mod::<{ RANK_PRIMES[0] }>(&int);
    let r1 = rank_mod::<{ RANK_PRIMES[1] }>(&int);
    let r2 = rank_mod::<{ RANK_PRIMES[2] }>(&int);
    if r0 == r1 && r1 == r2 {
        r0
    } else {
        bareiss_echelon(&int).rank()
    }
}
