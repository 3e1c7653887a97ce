//! Small-characteristic extension fields with fixed-size elements, and
//! Zech-logarithm tables for the fields small enough to tabulate.

use crate::error::{Error, Result};
use crate::padic::ExtField;

pub const MAX_K: usize = 16;

/// Coefficients of an element in the polynomial basis, low degree first.
pub type El = [u16; MAX_K];

/// `F_{p^k} = F_p[X]/(μ)` with `μ` primitive, so `X` generates `F_{p^k}^×`.
#[derive(Clone, Debug)]
pub struct Gf {
    p: u64,
    k: usize,
    q: u64,
    modulus: [u64; MAX_K + 1],
    gen: El,
    nonresidue: El,
}

impl Gf {
    pub fn new(p: u64, k: usize) -> Result<Self> {
        if k == 0 || k > MAX_K || p >= 1 << 16 {
            return Err(Error::SizeTooLarge);
        }
        let q = p.checked_pow(k as u32).filter(|&q| q < 1 << 62).ok_or(Error::SizeTooLarge)?;
        let ext = ExtField::primitive(p, k);
        let mut modulus = [0u64; MAX_K + 1];
        modulus[..=k].copy_from_slice(ext.modulus());
        let mut gen = [0u16; MAX_K];
        for (g, c) in gen.iter_mut().zip(ext.generator()) {
            *g = c as u16;
        }
        let mut f = Gf { p, k, q, modulus, gen, nonresidue: [0; MAX_K] };
        // a generator is never a square
        f.nonresidue = gen;
        Ok(f)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn generator(&self) -> El {
        self.gen
    }

    pub fn nonresidue(&self) -> El {
        self.nonresidue
    }

    pub fn zero(&self) -> El {
        [0; MAX_K]
    }

    pub fn one(&self) -> El {
        self.constant(1)
    }

    pub fn constant(&self, c: u64) -> El {
        let mut e = [0; MAX_K];
        e[0] = (c % self.p) as u16;
        e
    }

    pub fn is_zero(&self, a: &El) -> bool {
        a[..self.k].iter().all(|&c| c == 0)
    }

    pub fn code(&self, a: &El) -> u64 {
        a[..self.k].iter().rev().fold(0, |acc, &c| acc * self.p + c as u64)
    }

    pub fn from_code(&self, mut code: u64) -> El {
        let mut e = [0; MAX_K];
        for c in e.iter_mut().take(self.k) {
            *c = (code % self.p) as u16;
            code /= self.p;
        }
        e
    }

    pub fn add(&self, a: &El, b: &El) -> El {
        let mut e = [0; MAX_K];
        for i in 0..self.k {
            let s = a[i] as u64 + b[i] as u64;
            e[i] = if s >= self.p { s - self.p } else { s } as u16;
        }
        e
    }

    pub fn neg(&self, a: &El) -> El {
        let mut e = [0; MAX_K];
        for i in 0..self.k {
            e[i] = if a[i] == 0 { 0 } else { (self.p - a[i] as u64) as u16 };
        }
        e
    }

    pub fn sub(&self, a: &El, b: &El) -> El {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &El, b: &El) -> El {
        let (p, k) = (self.p, self.k);
        let mut t = [0u64; 2 * MAX_K];
        for i in 0..k {
            let x = a[i] as u64;
            if x == 0 {
                continue;
            }
            for j in 0..k {
                t[i + j] += x * b[j] as u64;
            }
        }
        for i in (k..2 * k - 1).rev() {
            let c = t[i] % p;
            if c != 0 {
                let c = p - c;
                for j in 0..k {
                    t[i - k + j] += c * self.modulus[j];
                }
            }
        }
        let mut e = [0; MAX_K];
        for i in 0..k {
            e[i] = (t[i] % p) as u16;
        }
        e
    }

    pub fn scale(&self, a: &El, c: u64) -> El {
        self.mul(a, &self.constant(c))
    }

    pub fn pow(&self, a: &El, mut e: u64) -> El {
        let (mut b, mut acc) = (*a, self.one());
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &El) -> Option<El> {
        (!self.is_zero(a)).then(|| self.pow(a, self.q - 2))
    }

    /// Quadratic character, `χ(0) = 0`.
    pub fn chi(&self, a: &El) -> i64 {
        if self.is_zero(a) {
            return 0;
        }
        if self.pow(a, (self.q - 1) / 2) == self.one() {
            1
        } else {
            -1
        }
    }

    /// A square root by Tonelli–Shanks, if one exists.
    pub fn sqrt(&self, a: &El) -> Option<El> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if self.chi(a) != 1 {
            return None;
        }
        let (mut s, mut t) = (0u32, self.q - 1);
        while t % 2 == 0 {
            s += 1;
            t /= 2;
        }
        let mut c = self.pow(&self.nonresidue, t);
        let mut x = self.pow(a, t.div_ceil(2));
        let mut b = self.pow(a, t);
        let mut m = s;
        let one = self.one();
        while b != one {
            let mut i = 0;
            let mut bb = b;
            while bb != one {
                bb = self.mul(&bb, &bb);
                i += 1;
            }
            for _ in 0..m - i - 1 {
                c = self.mul(&c, &c);
            }
            x = self.mul(&x, &c);
            c = self.mul(&c, &c);
            b = self.mul(&b, &c);
            m = i;
        }
        Some(x)
    }

    /// Horner evaluation of a polynomial with coefficients in `F_p`.
    pub fn eval_fp(&self, coeffs: &[u64], y: &El) -> El {
        coeffs.iter().rev().fold(self.zero(), |acc, &c| self.add(&self.mul(&acc, y), &self.constant(c)))
    }

    /// `y ↦ y^p`.
    pub fn frobenius(&self, a: &El) -> El {
        self.pow(a, self.p)
    }
}

pub const LOG_ZERO: u32 = u32::MAX;

/// Discrete logarithms to the base `X` and the Zech table
/// `Z(j) = log(1 + X^j)`, so that addition is a table lookup.
pub struct ZechTables {
    q1: u32,
    log: Vec<u32>,
    exp: Vec<u32>,
    zech: Vec<u32>,
}

impl ZechTables {
    pub fn new(gf: &Gf) -> Result<Self> {
        if gf.order() > 1 << 26 {
            return Err(Error::SizeTooLarge);
        }
        let q = gf.order() as usize;
        let q1 = (q - 1) as u32;
        let mut log = vec![LOG_ZERO; q];
        let mut exp = vec![0u32; q - 1];
        let mut x = gf.one();
        let g = gf.generator();
        for (j, slot) in exp.iter_mut().enumerate() {
            let c = gf.code(&x) as usize;
            *slot = c as u32;
            log[c] = j as u32;
            x = gf.mul(&x, &g);
        }
        let one = gf.one();
        let zech = exp
            .iter()
            .map(|&c| log[gf.code(&gf.add(&gf.from_code(c as u64), &one)) as usize])
            .collect();
        Ok(ZechTables { q1, log, exp, zech })
    }

    pub fn log_of(&self, gf: &Gf, a: &El) -> u32 {
        self.log[gf.code(a) as usize]
    }

    pub fn exp_code(&self, j: u32) -> u64 {
        self.exp[j as usize] as u64
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == LOG_ZERO || b == LOG_ZERO {
            return LOG_ZERO;
        }
        let s = a as u64 + b as u64;
        (s % self.q1 as u64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if a == LOG_ZERO {
            return b;
        }
        if b == LOG_ZERO {
            return a;
        }
        let d = if b >= a { b - a } else { b + self.q1 - a };
        let z = self.zech[d as usize];
        if z == LOG_ZERO {
            LOG_ZERO
        } else {
            self.mul(a, z)
        }
    }

    /// `Σ_x χ(x³ + A x + B)` over the whole field, by enumeration.
    pub fn cubic_character_sum(&self, a: u32, b: u32) -> i64 {
        let q1 = self.q1 as u64;
        let chi = |t: u32| -> i64 {
            if t == LOG_ZERO {
                0
            } else if t.is_multiple_of(2) {
                1
            } else {
                -1
            }
        };
        let mut sum = chi(b);
        let mut cube = 0u64;
        for i in 0..self.q1 {
            let ax = self.mul(a, i);
            let t = self.add(self.add(cube as u32, ax), b);
            sum += chi(t);
            cube += 3;
            if cube >= q1 {
                cube -= q1;
            }
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_and_sqrt() {
        for (p, k) in [(5u64, 1usize), (7, 2), (5, 3), (5, 11)] {
            let f = Gf::new(p, k).unwrap();
            let x = f.from_code(f.order() / 3 + 1);
            let y = f.from_code(f.order() / 7 + 2);
            assert_eq!(f.mul(&x, &f.inv(&x).unwrap()), f.one());
            assert_eq!(f.mul(&f.add(&x, &y), &y), f.add(&f.mul(&x, &y), &f.mul(&y, &y)));
            let s = f.mul(&x, &x);
            let r = f.sqrt(&s).unwrap();
            assert_eq!(f.mul(&r, &r), s);
            assert_eq!(f.chi(&f.generator()), -1);
            assert_eq!(f.pow(&x, f.order()), x);
        }
    }

    #[test]
    fn zech_addition_matches_field() {
        let f = Gf::new(7, 3).unwrap();
        let z = ZechTables::new(&f).unwrap();
        for (ca, cb) in [(3u64, 100u64), (5, 5), (17, 300), (1, 6)] {
            let (a, b) = (f.from_code(ca), f.from_code(cb));
            let s = z.add(z.log_of(&f, &a), z.log_of(&f, &b));
            let expect = f.add(&a, &b);
            if f.is_zero(&expect) {
                assert_eq!(s, LOG_ZERO);
            } else {
                assert_eq!(z.exp_code(s), f.code(&expect));
            }
        }
    }
}
