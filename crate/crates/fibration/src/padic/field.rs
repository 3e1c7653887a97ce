//! The prime field `F_p`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// The prime field `F_p`, `p > 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p <= 3 || !is_prime(p) || p >= 1 << 31 {
            return Err(Error::BadPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, n: i64) -> Fp {
        Fp::from_i64(n, self.p)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fp> + '_ {
        (0..self.p).map(move |v| Fp::new(v, self.p))
    }
}

/// Trial division; the primes here are tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// An element of `F_p` carrying its modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    pub v: u64,
    pub p: u64,
}

impl Fp {
    pub fn new(v: u64, p: u64) -> Self {
        Fp { v: v % p, p }
    }

    pub fn from_i64(n: i64, p: u64) -> Self {
        Fp { v: n.rem_euclid(p as i64) as u64, p }
    }

    pub fn is_zero(&self) -> bool {
        self.v == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let (mut b, mut acc) = (self, Fp::new(1, self.p));
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b;
            }
            b = b * b;
            e >>= 1;
        }
        acc
    }

    pub fn inv(self) -> Option<Self> {
        (self.v != 0).then(|| self.pow(self.p - 2))
    }

    /// Legendre symbol: 0, 1 or -1.
    pub fn chi(self) -> i64 {
        if self.v == 0 {
            0
        } else if self.pow((self.p - 1) / 2).v == 1 {
            1
        } else {
            -1
        }
    }

    /// Symmetric representative in `(-p/2, p/2]`.
    pub fn signed(self) -> i64 {
        if self.v > self.p / 2 {
            self.v as i64 - self.p as i64
        } else {
            self.v as i64
        }
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        let s = self.v + o.v;
        Fp { v: if s >= self.p { s - self.p } else { s }, p: self.p }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        Fp { v: if self.v >= o.v { self.v - o.v } else { self.v + self.p - o.v }, p: self.p }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        Fp { v: self.v * o.v % self.p, p: self.p }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { v: if self.v == 0 { 0 } else { self.p - self.v }, p: self.p }
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}
