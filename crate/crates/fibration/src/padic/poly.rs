//! Dense univariate polynomials.

use super::coeff::Coeff;
use super::field::Fp;

/// Dense polynomial, coefficients in ascending order.
///
/// Exactly-zero trailing coefficients are dropped; p-adic coefficients are
/// never exactly zero, so p-adic polynomials keep their stored length (and
/// with it the precision of every coefficient).
#[derive(Clone, Debug)]
pub struct Poly<C> {
    coeffs: Vec<C>,
}

impl<C: PartialEq> PartialEq for Poly<C> {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs == o.coeffs
    }
}

impl<C: Coeff> Poly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn monomial(c: C, k: usize) -> Self {
        let mut v = vec![c.zero_like(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the last stored coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Option<&C> {
        self.coeffs.get(i)
    }

    pub fn lead(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.len().max(o.len());
        let v = (0..n)
            .map(|i| match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::new(v)
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Schoolbook product.
    pub fn mul(&self, o: &Self) -> Self {
        if self.is_empty() || o.is_empty() {
            return Poly::zero();
        }
        let zero = self.coeffs[0].zero_like();
        let n = self.len() + o.len() - 1;
        let v = (0..n)
            .map(|k| {
                let lo = k.saturating_sub(o.len() - 1);
                let hi = k.min(self.len() - 1);
                C::dot(&zero, (lo..=hi).map(|i| (&self.coeffs[i], &o.coeffs[k - i])))
            })
            .collect();
        Poly::new(v)
    }

    pub fn scale(&self, c: &C) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn eval(&self, x: &C) -> Option<C> {
        let mut it = self.coeffs.iter().rev();
        let mut acc = it.next()?.clone();
        for c in it {
            acc = acc.mul(x).add(c);
        }
        Some(acc)
    }

    pub fn derivative(&self) -> Self {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.mul_i64(i as i64)).collect())
    }

    /// `f(y^k)`.
    pub fn inflate(&self, k: usize) -> Self {
        if self.is_empty() {
            return Poly::zero();
        }
        let zero = self.coeffs[0].zero_like();
        let mut v = vec![zero; (self.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * k] = c.clone();
        }
        Poly::new(v)
    }

    /// Keeps coefficients of degree `< n`.
    pub fn truncate(&self, n: usize) -> Self {
        Poly::new(self.coeffs.iter().take(n).cloned().collect())
    }

    /// Euclidean division by a polynomial with invertible leading coefficient.
    pub fn divrem(&self, d: &Self) -> Option<(Self, Self)> {
        let dl = d.lead()?.try_inv()?;
        let dn = d.len();
        if self.len() < dn {
            return Some((Poly::zero(), self.clone()));
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![dl.zero_like(); self.len() - dn + 1];
        for k in (0..q.len()).rev() {
            let c = r[k + dn - 1].mul(&dl);
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j].sub(&c.mul(dj));
            }
            q[k] = c;
        }
        r.truncate(dn - 1);
        Some((Poly::new(q), Poly::new(r)))
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl Poly<Fp> {
    pub fn from_i64s(p: u64, cs: &[i64]) -> Self {
        Poly::new(cs.iter().map(|&c| Fp::from_i64(c, p)).collect())
    }

    pub fn make_monic(&self) -> Self {
        match self.lead() {
            Some(l) => self.scale(&l.inv().expect("nonzero lead")),
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_empty() {
            let (_, r) = a.divrem(&b).expect("field");
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// `self^e mod m`.
    pub fn powmod(&self, mut e: u64, m: &Self) -> Self {
        let one = Fp::new(1, m.lead().expect("nonzero").p);
        let mut acc = Poly::new(vec![one]);
        let mut b = self.divrem(m).expect("field").1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b).divrem(m).expect("field").1;
            }
            b = b.mul(&b).divrem(m).expect("field").1;
            e >>= 1;
        }
        acc
    }

    /// No repeated factor over the algebraic closure (`gcd(f, f') = 1`).
    pub fn is_squarefree(&self) -> bool {
        self.degree().is_some_and(|d| d == 0 || self.gcd(&self.derivative()).degree() == Some(0))
    }

    /// Irreducibility over `F_p` via Rabin's test.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        let p = self.lead().unwrap().p;
        let f = self.make_monic();
        let x = Poly::from_i64s(p, &[0, 1]);
        let frob = |k: usize| {
            let mut t = x.clone();
            for _ in 0..k {
                t = t.powmod(p, &f);
            }
            t
        };
        if frob(n).sub(&x).divrem(&f).unwrap().1.degree().is_some() {
            return false;
        }
        let mut primes = Vec::new();
        let mut m = n;
        let mut q = 2;
        while m > 1 {
            if m % q == 0 {
                primes.push(q);
                while m % q == 0 {
                    m /= q;
                }
            }
            q += 1;
        }
        primes.iter().all(|&q| f.gcd(&frob(n / q).sub(&x)).degree() == Some(0))
    }

    pub fn values(&self) -> Vec<i64> {
        self.coeffs.iter().map(|c| c.v as i64).collect()
    }
}
