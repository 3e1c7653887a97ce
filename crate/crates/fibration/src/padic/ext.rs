//! Extension fields `F_{p^k}` (used by the point-counting oracle only).

use super::field::Fp;
use super::poly::Poly;
use crate::error::{Error, Result};

/// `F_p[x]/(modulus)` with `modulus` monic irreducible of degree `k`.
///
/// Elements are coefficient vectors of length `k`; the integer
/// `Σ c_i p^i` is the element's *code*, a bijection onto `0..p^k`.
#[derive(Clone, Debug)]
pub struct ExtField {
    p: u64,
    k: usize,
    modulus: Vec<u64>,
}

pub type ExtElem = Vec<u64>;

impl ExtField {
    /// Checks irreducibility of the monic `modulus` (ascending coefficients).
    pub fn new(p: u64, modulus: &[u64]) -> Result<Self> {
        let k = modulus.len().saturating_sub(1);
        let poly = Poly::new(modulus.iter().map(|&c| Fp::new(c, p)).collect());
        if k == 0 || modulus[k] % p != 1 || poly.degree() != Some(k) || !poly.is_irreducible() {
            return Err(Error::ReducibleModulus(k));
        }
        Ok(ExtField { p, k, modulus: modulus.iter().map(|c| c % p).collect() })
    }

    /// The first monic irreducible modulus (in code order) whose root `x`
    /// generates the multiplicative group.
    pub fn primitive(p: u64, k: usize) -> Self {
        if k == 1 {
            let g = (2..p).find(|&g| is_generator(g, p)).unwrap_or(1);
            return ExtField { p, k, modulus: vec![(p - g) % p, 1] };
        }
        let q = p.pow(k as u32);
        for code in 0..q {
            let mut m = digits(code, p, k);
            m.push(1);
            if let Ok(f) = ExtField::new(p, &m) {
                if f.x_is_primitive() {
                    return f;
                }
            }
        }
        unreachable!("primitive polynomials exist in every degree")
    }

    fn x_is_primitive(&self) -> bool {
        let q1 = self.order() - 1;
        let x = self.generator();
        prime_factors(q1).into_iter().all(|r| !self.is_one(&self.pow(&x, q1 / r)))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    pub fn zero(&self) -> ExtElem {
        vec![0; self.k]
    }

    pub fn one(&self) -> ExtElem {
        self.embed(1)
    }

    pub fn embed(&self, c: i64) -> ExtElem {
        let mut v = self.zero();
        v[0] = c.rem_euclid(self.p as i64) as u64;
        v
    }

    /// The class of `x` (for `k = 1`, the root of the linear modulus).
    pub fn generator(&self) -> ExtElem {
        if self.k == 1 {
            return vec![(self.p - self.modulus[0]) % self.p];
        }
        let mut v = self.zero();
        v[1] = 1;
        v
    }

    pub fn is_one(&self, a: &[u64]) -> bool {
        a[0] == 1 && a[1..].iter().all(|&c| c == 0)
    }

    pub fn from_code(&self, code: u64) -> ExtElem {
        digits(code, self.p, self.k)
    }

    pub fn code(&self, a: &[u64]) -> u64 {
        a.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> ExtElem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn neg(&self, a: &[u64]) -> ExtElem {
        a.iter().map(|x| (self.p - x) % self.p).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> ExtElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> ExtElem {
        let (p, k) = (self.p, self.k);
        let mut t = vec![0u64; 2 * k - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                t[i + j] = (t[i + j] + x * y) % p;
            }
        }
        for i in (k..2 * k - 1).rev() {
            let c = t[i];
            if c != 0 {
                for j in 0..k {
                    t[i - k + j] = (t[i - k + j] + (p - c) * self.modulus[j]) % p;
                }
            }
        }
        t.truncate(k);
        t
    }

    /// Multiplication by the generator (a shift for `k > 1`).
    pub fn mul_by_generator(&self, a: &[u64]) -> ExtElem {
        if self.k == 1 {
            return vec![a[0] * self.generator()[0] % self.p];
        }
        let p = self.p;
        let top = a[self.k - 1];
        let mut v = Vec::with_capacity(self.k);
        v.push(0);
        v.extend_from_slice(&a[..self.k - 1]);
        if top != 0 {
            for j in 0..self.k {
                v[j] = (v[j] + (p - top) * self.modulus[j]) % p;
            }
        }
        v
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> ExtElem {
        let mut acc = self.one();
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn frobenius(&self, a: &[u64]) -> ExtElem {
        self.pow(a, self.p)
    }
}

fn digits(mut code: u64, p: u64, k: usize) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let d = code % p;
            code /= p;
            d
        })
        .collect()
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn is_generator(g: u64, p: u64) -> bool {
    let f = Fp::new(g, p);
    prime_factors(p - 1).into_iter().all(|r| f.pow((p - 1) / r).v != 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reducible_modulus() {
        assert!(ExtField::new(5, &[1, 0, 1]).is_err());
        assert!(ExtField::new(5, &[2, 0, 1]).is_ok());
    }

    #[test]
    fn frobenius_has_order_k() {
        for (p, k) in [(5, 3), (7, 2), (5, 4)] {
            let f = ExtField::primitive(p, k);
            for code in (0..f.order()).step_by(7) {
                let a = f.from_code(code);
                let mut b = a.clone();
                for _ in 0..k {
                    b = f.frobenius(&b);
                }
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn generator_is_primitive() {
        let f = ExtField::primitive(7, 2);
        let x = f.generator();
        let mut seen = std::collections::HashSet::new();
        let mut t = f.one();
        for _ in 0..48 {
            seen.insert(f.code(&t));
            t = f.mul_by_generator(&t);
        }
        assert_eq!(seen.len(), 48);
        assert_eq!(f.mul(&x, &f.one()), x);
    }
}
