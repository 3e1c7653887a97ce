//! The ring interface shared by every coefficient type.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::Fp;
use super::scalar::PadicScalar;

/// Minimal commutative-ring interface used by [`Poly`](super::Poly),
/// [`TruncSeries`](super::TruncSeries) and [`Matrix`](super::Matrix).
///
/// Constants are produced "like" an existing element so contextual data
/// (the prime, a precision) travels with them.
pub trait Coeff: Clone + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self;
    /// Exactly zero (safe to drop as a trailing coefficient).
    fn is_exact_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Inverse when it exists in the coefficient ring.
    fn try_inv(&self) -> Option<Self>;

    fn mul_i64(&self, n: i64) -> Self {
        self.mul(&self.from_i64_like(n))
    }

    /// `zero + Σ a·b`.
    fn dot<'a, I: IntoIterator<Item = (&'a Self, &'a Self)>>(zero: &Self, pairs: I) -> Self
    where
        Self: 'a,
    {
        pairs.into_iter().fold(zero.clone(), |acc, (a, b)| acc.add(&a.mul(b)))
    }
}

impl Coeff for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigInt::from(n)
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn try_inv(&self) -> Option<Self> {
        if self.is_one() || (-self).is_one() {
            Some(self.clone())
        } else {
            None
        }
    }
}

impl Coeff for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn try_inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}

impl Coeff for Fp {
    fn zero_like(&self) -> Self {
        Fp::new(0, self.p)
    }
    fn one_like(&self) -> Self {
        Fp::new(1, self.p)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Fp::from_i64(n, self.p)
    }
    fn is_exact_zero(&self) -> bool {
        self.v == 0
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv()
    }
}

impl Coeff for PadicScalar {
    /// An exact zero, so it never limits the precision of a sum.
    fn zero_like(&self) -> Self {
        self.ring().zero(super::scalar::EXACT_PREC)
    }
    fn one_like(&self) -> Self {
        self.ring().one(self.precision().max(1))
    }
    fn from_i64_like(&self, n: i64) -> Self {
        self.ring().from_i64(n, self.precision().max(1))
    }
    /// Inexact zeros carry precision information and are never dropped.
    fn is_exact_zero(&self) -> bool {
        false
    }
    fn add(&self, o: &Self) -> Self {
        PadicScalar::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        PadicScalar::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        PadicScalar::mul(self, o)
    }
    fn neg(&self) -> Self {
        PadicScalar::neg(self)
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn mul_i64(&self, n: i64) -> Self {
        self.mul_int(n)
    }
    fn dot<'a, I: IntoIterator<Item = (&'a Self, &'a Self)>>(zero: &Self, pairs: I) -> Self {
        PadicScalar::dot(zero, pairs)
    }
}
