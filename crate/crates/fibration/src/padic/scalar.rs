//! Precision-tracked p-adic scalars.
//!
//! A [`PadicScalar`] is `p^val · unit`, known modulo `p^prec` (absolute
//! precision).  Valuations may be negative, so the type also covers the small
//! denominators that appear mid-computation; integral elements behave exactly
//! like residues in `Z/p^prec`.

use std::cmp::min;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Precision used for exact constants such as the additive identity.
pub const EXACT_PREC: i64 = 1 << 40;

/// Shared per-prime context holding cached powers of `p`.
///
/// Cloned by `Arc` into every scalar; never mutated after construction.
#[derive(Debug)]
pub struct PadicRing {
    p: u64,
    pows: Vec<BigUint>,
}

impl PadicRing {
    /// Context for the prime `p` with powers cached up to `p^max_prec`.
    pub fn new(p: u64, max_prec: usize) -> Arc<Self> {
        let mut pows = Vec::with_capacity(max_prec + 1);
        let mut acc = BigUint::one();
        for _ in 0..=max_prec {
            pows.push(acc.clone());
            acc *= p;
        }
        Arc::new(PadicRing { p, pows })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn with_pow<R>(&self, n: i64, f: impl FnOnce(&BigUint) -> R) -> R {
        debug_assert!(n >= 0);
        assert!(n < 1 << 24, "p^{n}: exact constants are not representable; use a finite precision");
        let n = n as usize;
        if n < self.pows.len() {
            f(&self.pows[n])
        } else {
            f(&BigUint::from(self.p).pow(n as u32))
        }
    }

    /// `p^n` as a big integer.
    pub fn pow(&self, n: usize) -> BigUint {
        self.with_pow(n as i64, |x| x.clone())
    }

    pub fn zero(self: &Arc<Self>, prec: i64) -> PadicScalar {
        PadicScalar::zero_in(self.clone(), prec)
    }

    pub fn one(self: &Arc<Self>, prec: i64) -> PadicScalar {
        self.from_i64(1, prec)
    }

    pub fn from_i64(self: &Arc<Self>, n: i64, prec: i64) -> PadicScalar {
        self.from_bigint(&BigInt::from(n), prec)
    }

    pub fn from_bigint(self: &Arc<Self>, n: &BigInt, prec: i64) -> PadicScalar {
        if n.is_zero() {
            return self.zero(prec);
        }
        let (mut u, mut v) = (n.magnitude().clone(), 0i64);
        while mod_small(&u, self.p) == 0 {
            u /= self.p;
            v += 1;
        }
        let neg = n.sign() == Sign::Minus;
        PadicScalar::from_parts(self.clone(), v, prec, u, neg)
    }

    /// The rational `num/den` to absolute precision `prec`.
    pub fn from_ratio(self: &Arc<Self>, num: &BigInt, den: &BigInt, prec: i64) -> PadicScalar {
        assert!(!den.is_zero(), "zero denominator");
        let d = self.from_bigint(den, prec + 2 * bigint_val(den, self.p) + 2);
        let n = self.from_bigint(num, prec + 2 * bigint_val(den, self.p) + 2);
        let q = n.div(&d).expect("nonzero denominator");
        q.with_cap(prec)
    }

    pub fn from_rational(self: &Arc<Self>, q: &BigRational, prec: i64) -> PadicScalar {
        self.from_ratio(q.numer(), q.denom(), prec)
    }

    /// An integral element from its residue `value mod p^prec`.
    pub fn from_residue(self: &Arc<Self>, value: &BigUint, prec: i64) -> PadicScalar {
        let r = self.with_pow(prec.max(0), |m| value % m);
        self.from_bigint(&BigInt::from(r), prec)
    }
}

/// `x mod p` for a small prime without allocating.
pub(crate) fn mod_small(x: &BigUint, p: u64) -> u64 {
    let mut r: u128 = 0;
    for d in x.iter_u64_digits().rev() {
        r = ((r << 64) | d as u128) % p as u128;
    }
    r as u64
}

/// `p`-adic valuation of a nonzero integer (`i64::MAX` for zero).
pub fn bigint_val(n: &BigInt, p: u64) -> i64 {
    if n.is_zero() {
        return i64::MAX / 4;
    }
    let mut u = n.magnitude().clone();
    let mut v = 0;
    while mod_small(&u, p) == 0 {
        u /= p;
        v += 1;
    }
    v
}

/// Valuation of a machine integer (`i64::MAX / 4` for zero).
pub fn int_val(mut n: i64, p: u64) -> i64 {
    if n == 0 {
        return i64::MAX / 4;
    }
    let mut v = 0;
    while n % p as i64 == 0 {
        n /= p as i64;
        v += 1;
    }
    v
}

/// A p-adic number `p^val · unit + O(p^prec)`.
///
/// Invariant: either `unit == 0` and `val == prec` (indistinguishable from
/// zero), or `p ∤ unit`, `val < prec` and `unit < p^(prec - val)`.
#[derive(Clone)]
pub struct PadicScalar {
    ring: Arc<PadicRing>,
    val: i64,
    prec: i64,
    unit: BigUint,
}

impl PadicScalar {
    fn zero_in(ring: Arc<PadicRing>, prec: i64) -> Self {
        PadicScalar { ring, val: prec, prec, unit: BigUint::zero() }
    }

    /// Builds `(-1)^neg · p^val · u` at precision `prec`, `p ∤ u` assumed.
    fn from_parts(ring: Arc<PadicRing>, val: i64, prec: i64, u: BigUint, neg: bool) -> Self {
        if val >= prec {
            return Self::zero_in(ring, prec);
        }
        let rel = prec - val;
        let unit = ring.with_pow(rel, |m| {
            let r = u % m;
            if neg && !r.is_zero() {
                m - r
            } else {
                r
            }
        });
        PadicScalar { ring, val, prec, unit }
    }

    /// Normalizes `p^v0 · acc` (any `acc`) at precision `prec`.
    fn normalize(ring: Arc<PadicRing>, v0: i64, prec: i64, acc: BigUint) -> Self {
        if v0 >= prec {
            return Self::zero_in(ring, prec);
        }
        let mut acc = ring.with_pow(prec - v0, |m| acc % m);
        if acc.is_zero() {
            return Self::zero_in(ring, prec);
        }
        let mut v = v0;
        while mod_small(&acc, ring.p) == 0 {
            acc /= ring.p;
            v += 1;
        }
        PadicScalar { ring, val: v, prec, unit: acc }
    }

    pub fn ring(&self) -> &Arc<PadicRing> {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p
    }

    /// Valuation; equals the precision when the element is indistinguishable from 0.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    /// Absolute precision: the value is known modulo `p^prec`.
    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Precision relative to the valuation.
    pub fn relative_precision(&self) -> i64 {
        self.prec - self.val
    }

    pub fn unit_part(&self) -> &BigUint {
        &self.unit
    }

    /// True when the element is `O(p^prec)`.
    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.val == 0
    }

    /// Residue in `[0, p^prec)` of an integral element.
    pub fn residue(&self) -> BigUint {
        assert!(self.val >= 0, "residue of a non-integral element");
        if self.is_zero() {
            return BigUint::zero();
        }
        self.ring.with_pow(self.val, |pv| &self.unit * pv)
    }

    /// Representative in `(-p^prec/2, p^prec/2]` of an integral element.
    pub fn lift_symmetric(&self) -> BigInt {
        if self.is_zero() {
            return BigInt::zero();
        }
        let r = BigInt::from(self.residue());
        let m = BigInt::from(self.ring.pow(self.prec.max(0) as usize));
        if &r * 2 > m {
            r - m
        } else {
            r
        }
    }

    /// Symmetric lift as a rational: `p^val ·` (unit lifted to `(-p^r/2, p^r/2]`).
    pub fn to_rational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let rel = self.relative_precision();
        let m = BigInt::from(self.ring.pow(rel as usize));
        let mut u = BigInt::from(self.unit.clone());
        if &u * 2 > m {
            u -= m;
        }
        let pv = BigInt::from(self.ring.pow(self.val.unsigned_abs() as usize));
        if self.val >= 0 {
            BigRational::from_integer(u * pv)
        } else {
            BigRational::new(u, pv)
        }
    }

    /// Same element with precision lowered to at most `cap`.
    pub fn with_cap(&self, cap: i64) -> Self {
        if cap >= self.prec {
            return self.clone();
        }
        Self::normalize(self.ring.clone(), self.val, cap, self.unit.clone())
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.ring.p, o.ring.p, "p-adic modulus mismatch");
    }

    /// Fallible variant of `mul` reporting a modulus mismatch.
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.ring.p != o.ring.p {
            return Err(Error::ModulusMismatch(self.ring.p, o.ring.p));
        }
        Ok(self.mul(o))
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let prec = min(self.prec, o.prec);
        let v0 = min(min(self.val, o.val), prec);
        if v0 >= prec {
            return Self::zero_in(self.ring.clone(), prec);
        }
        let mut acc = BigUint::zero();
        for x in [self, o] {
            if !x.is_zero() && x.val < prec {
                acc += x.ring.with_pow(x.val - v0, |s| &x.unit * s);
            }
        }
        Self::normalize(self.ring.clone(), v0, prec, acc)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let unit = self.ring.with_pow(self.prec - self.val, |m| m - &self.unit);
        PadicScalar { ring: self.ring.clone(), val: self.val, prec: self.prec, unit }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Product; absolute precision `min(prec_x + val_y, prec_y + val_x)`.
    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let prec = min(self.prec + o.val, o.prec + self.val);
        if self.is_zero() || o.is_zero() {
            return Self::zero_in(self.ring.clone(), prec);
        }
        let v = self.val + o.val;
        if v >= prec {
            return Self::zero_in(self.ring.clone(), prec);
        }
        let unit = self.ring.with_pow(prec - v, |m| (&self.unit * &o.unit) % m);
        PadicScalar { ring: self.ring.clone(), val: v, prec, unit }
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, n: i64) -> Self {
        let v = int_val(n, self.ring.p);
        if n == 0 {
            return Self::zero_in(self.ring.clone(), EXACT_PREC);
        }
        if self.is_zero() {
            return Self::zero_in(self.ring.clone(), self.prec + v);
        }
        let m = n.unsigned_abs() / self.ring.p.pow(v as u32);
        Self::from_parts(self.ring.clone(), self.val + v, self.prec + v, &self.unit * m, n < 0)
    }

    /// Division by an exact nonzero integer (loses `ord_p(n)` digits).
    pub fn div_int(&self, n: i64) -> Self {
        assert!(n != 0, "division by zero");
        let v = int_val(n, self.ring.p);
        if self.is_zero() {
            return Self::zero_in(self.ring.clone(), self.prec - v);
        }
        let m = BigInt::from(n.unsigned_abs() / self.ring.p.pow(v as u32));
        let modulus = BigInt::from(self.ring.pow((self.prec - self.val) as usize));
        let g = m.extended_gcd(&modulus);
        let mut inv = g.x % &modulus;
        if inv.is_negative() {
            inv += &modulus;
        }
        let u = &self.unit * inv.to_biguint().expect("nonnegative");
        Self::from_parts(self.ring.clone(), self.val - v, self.prec - v, u, n < 0)
    }

    /// Multiplication by `p^k` (exact shift).
    pub fn shift(&self, k: i64) -> Self {
        PadicScalar {
            ring: self.ring.clone(),
            val: self.val + k,
            prec: self.prec + k,
            unit: self.unit.clone(),
        }
    }

    /// Multiplicative inverse; errors on elements indistinguishable from zero.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NonUnit);
        }
        let rel = self.prec - self.val;
        let m = BigInt::from(self.ring.pow(rel as usize));
        let g = BigInt::from(self.unit.clone()).extended_gcd(&m);
        debug_assert!(g.gcd.is_one());
        let mut x = g.x % &m;
        if x.is_negative() {
            x += &m;
        }
        Ok(PadicScalar {
            ring: self.ring.clone(),
            val: -self.val,
            prec: rel - self.val,
            unit: x.to_biguint().expect("nonnegative"),
        })
    }

    /// Inverse of a p-adic unit (the `Z_p` notion: errors when `p | x`).
    pub fn inv_unit(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        self.inv()
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc.unwrap_or_else(|| self.ring.one(self.prec.max(1)))
    }

    /// `Σ xs[i]·ys[i]` with a single final reduction.
    ///
    /// Precision is the minimum of the per-term product precisions, exactly as
    /// repeated `mul`/`add` would give, but far cheaper.
    pub fn dot<'a, I>(zero: &Self, pairs: I) -> Self
    where
        I: IntoIterator<Item = (&'a PadicScalar, &'a PadicScalar)>,
    {
        let mut prec = zero.prec;
        let mut terms: Vec<(i64, &BigUint, &BigUint)> = Vec::new();
        for (x, y) in pairs {
            prec = min(prec, min(x.prec + y.val, y.prec + x.val));
            if !x.is_zero() && !y.is_zero() {
                terms.push((x.val + y.val, &x.unit, &y.unit));
            }
        }
        let ring = zero.ring.clone();
        let v0 = terms.iter().map(|t| t.0).min().unwrap_or(prec).min(prec);
        if v0 >= prec {
            return Self::zero_in(ring, prec);
        }
        let mut acc = BigUint::zero();
        for (v, a, b) in terms {
            if v < prec {
                if v == v0 {
                    acc += a * b;
                } else {
                    acc += ring.with_pow(v - v0, |s| a * b * s);
                }
            }
        }
        Self::normalize(ring, v0, prec, acc)
    }

    /// Equality of the two values modulo `p^min(prec)`.
    pub fn congruent(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    /// Integer value when the element is integral and fits in `i64` (symmetric lift).
    pub fn to_i64(&self) -> Option<i64> {
        self.lift_symmetric().to_i64()
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "O({}^{})", self.ring.p, self.prec)
        } else {
            write!(f, "{}·{}^{} + O({}^{})", self.unit, self.ring.p, self.val, self.ring.p, self.prec)
        }
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.val >= 0 {
            write!(f, "{} + O({}^{})", self.lift_symmetric(), self.ring.p, self.prec)
        } else {
            write!(f, "{} + O({}^{})", self.to_rational(), self.ring.p, self.prec)
        }
    }
}

/// Product of two scalars (same prime); precision follows valuation rules.
pub fn padic_mul(x: &PadicScalar, y: &PadicScalar) -> Result<PadicScalar> {
    x.try_mul(y)
}

/// Inverse of a unit of `Z_p`; `NonUnit` when `p` divides the value.
pub fn padic_inv(x: &PadicScalar) -> Result<PadicScalar> {
    x.inv_unit()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: u64) -> Arc<PadicRing> {
        PadicRing::new(p, 64)
    }

    #[test]
    fn unit_times_unit() {
        let z = r(5);
        let x = padic_mul(&z.from_i64(3, 4), &z.from_i64(1, 4)).unwrap();
        assert_eq!(x.residue(), BigUint::from(3u32));
        assert_eq!(x.precision(), 4);
    }

    #[test]
    fn p_times_p_gains_precision() {
        let z = r(5);
        let x = z.from_i64(5, 4).mul(&z.from_i64(5, 4));
        assert_eq!(x.residue(), BigUint::from(25u32));
        assert_eq!(x.precision(), 5);
        assert_eq!(x.valuation(), 2);
    }

    #[test]
    fn inverse_examples() {
        let z = r(7);
        assert_eq!(padic_inv(&z.from_i64(1, 3)).unwrap().residue(), BigUint::from(1u32));
        let i2 = padic_inv(&z.from_i64(2, 3)).unwrap();
        assert_eq!(i2.residue(), BigUint::from(172u32));
        assert_eq!(i2.precision(), 3);
        assert_eq!(padic_inv(&z.from_i64(7, 3)).unwrap_err(), Error::NonUnit);
    }

    #[test]
    fn division_by_p_lowers_precision() {
        let z = r(7);
        let x = z.from_i64(14, 5).div_int(7);
        assert_eq!(x.precision(), 4);
        assert_eq!(x.residue(), BigUint::from(2u32));
        let y = z.from_i64(3, 5).div_int(7);
        assert_eq!(y.valuation(), -1);
        assert_eq!(y.precision(), 4);
        assert_eq!(y.mul_int(7).lift_symmetric(), BigInt::from(3));
    }

    #[test]
    fn mismatched_primes_error() {
        let a = r(5).from_i64(1, 3);
        let b = r(7).from_i64(1, 3);
        assert_eq!(padic_mul(&a, &b).unwrap_err(), Error::ModulusMismatch(5, 7));
    }

    #[test]
    fn cancellation_keeps_absolute_precision() {
        let z = r(5);
        let a = z.from_i64(126, 3);
        let b = z.from_i64(1, 3);
        let d = a.sub(&b);
        assert!(d.is_zero());
        assert_eq!(d.precision(), 3);
    }

    #[test]
    fn rational_round_trip() {
        let z = r(5);
        let q = BigRational::new(BigInt::from(-7), BigInt::from(50));
        let x = z.from_rational(&q, 10);
        assert_eq!(x.valuation(), -2);
        assert_eq!(x.precision(), 10);
        let back = x.mul(&z.from_i64(50, 20));
        assert_eq!(back.precision(), 12);
        assert_eq!(back.lift_symmetric(), BigInt::from(-7));
        let y = z.from_rational(&BigRational::new(BigInt::from(3), BigInt::from(25)), 10);
        assert_eq!(y.to_rational(), BigRational::new(BigInt::from(3), BigInt::from(25)));
    }

    #[test]
    fn dot_matches_sum_of_products() {
        let z = r(7);
        let xs: Vec<_> = [3i64, 49, -14, 5].iter().map(|&v| z.from_i64(v, 6)).collect();
        let ys: Vec<_> = [7i64, 2, 1, -343].iter().map(|&v| z.from_i64(v, 5)).collect();
        let d = PadicScalar::dot(&z.zero(100), xs.iter().zip(ys.iter()));
        let mut s = z.zero(100);
        for (x, y) in xs.iter().zip(&ys) {
            s = s.add(&x.mul(y));
        }
        assert_eq!(d.precision(), s.precision());
        assert!(d.congruent(&s));
        assert_eq!(d.lift_symmetric(), BigInt::from(21 + 98 - 14 - 1715));
    }
}
