//! Frobenius on the smooth fibre `y = 0` by Kedlaya's method.
//!
//! The lift `x ↦ x^p`, `z ↦ z^p·(1 + E/z^{2p})^{1/2}` with
//! `E = Q(x^p) − Q(x)^p` gives
//!
//! ```text
//! σ(x^i dx/z) = p · Σ_k binom(−1/2, k) · x^{p(i+1)−1} E^k dx / z^{p(2k+1)}
//! ```
//!
//! and each term is reduced to the basis `(dx/z, x dx/z)` in two passes:
//! pole order first, then `x`-degree.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::family::{floor_log, WeierstrassFamily};
use crate::gauss_manin::bezout_q;
use crate::padic::{Matrix, PadicRing, PadicScalar, Poly};

pub type PPoly = Poly<PadicScalar>;

/// The cubic `Q(x) = x³ + a0·x + b0` over `Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberCurve {
    pub p: u64,
    pub a0: BigInt,
    pub b0: BigInt,
}

impl FiberCurve {
    pub fn new(p: u64, a0: impl Into<BigInt>, b0: impl Into<BigInt>) -> Result<Self> {
        let (a0, b0) = (a0.into(), b0.into());
        let disc: BigInt = BigInt::from(4) * &a0 * &a0 * &a0 + BigInt::from(27) * &b0 * &b0;
        if (disc % BigInt::from(p)).is_zero() {
            return Err(Error::InvalidFamily("singular fibre: discriminant divisible by p".into()));
        }
        Ok(FiberCurve { p, a0, b0 })
    }

    /// The fibre of a family over `y = 0`.
    pub fn from_family(f: &WeierstrassFamily) -> Result<Self> {
        Self::new(f.p(), f.lifted_a()[0], f.lifted_b()[0])
    }

    /// `#{(x, z) ∈ F_p² : z² = Q(x)}`.
    pub fn affine_count(&self) -> u64 {
        let p = self.p as i64;
        let (a, b) = (mod_i64(&self.a0, p), mod_i64(&self.b0, p));
        let mut squares = vec![0u64; p as usize];
        for z in 0..p {
            squares[(z * z % p) as usize] += 1;
        }
        (0..p).map(|x| squares[((x * x % p * x + a * x + b) % p) as usize]).sum()
    }

    /// `a_p = p − #affine` (one point at infinity).
    pub fn trace_of_frobenius(&self) -> i64 {
        self.p as i64 - self.affine_count() as i64
    }
}

fn mod_i64(x: &BigInt, p: i64) -> i64 {
    let r = x % BigInt::from(p);
    let r: i64 = r.try_into().expect("small");
    r.rem_euclid(p)
}

/// The 2×2 Frobenius matrix on `(dx/z, x dx/z)`, columns = images.
#[derive(Clone, Debug)]
pub struct FiberFrobenius {
    pub f0: Matrix<PadicScalar>,
    pub n_work: i64,
}

impl FiberFrobenius {
    pub fn trace(&self) -> PadicScalar {
        self.f0.trace()
    }

    pub fn det(&self) -> PadicScalar {
        self.f0.det()
    }

    /// Minimum absolute precision over the entries.
    pub fn precision(&self) -> i64 {
        self.f0.data().iter().map(|c| c.precision()).min().unwrap_or(0)
    }
}

/// Lower bound on the valuation of the contribution of series term `k` to
/// the image of `x^i dx/z`: `k + 1` from `p·E^k`, minus the worst-case
/// denominators of the pole-order and `x`-degree reductions.
pub fn kedlaya_term_bound(p: u64, i: usize, k: usize) -> i64 {
    let pole = p * (2 * k as u64 + 1);
    let deg = p * (i as u64 + 1) + 3 * p * k as u64;
    k as i64 + 1 - floor_log(p, pole) as i64 - floor_log(p, 2 * deg + 3) as i64
}

/// Smallest `K` such that every dropped term `k > K` is `O(p^n)`.
pub fn kedlaya_truncation(p: u64, n: i64) -> usize {
    let ok_from = |k0: usize| (k0..k0 + 64).all(|k| kedlaya_term_bound(p, 1, k) >= n);
    (0..).find(|&k| ok_from(k + 1)).unwrap()
}

/// `binom(−1/2, k)`.
pub fn half_binomial(k: usize) -> BigRational {
    let mut c = BigRational::one();
    for j in 0..k {
        c *= BigRational::new(BigInt::from(-(2 * j as i64 + 1)), BigInt::from(2 * (j as i64 + 1)));
    }
    c
}

fn exact_poly(ring: &Arc<PadicRing>, cs: &[BigInt], prec: i64) -> PPoly {
    Poly::new(cs.iter().map(|c| ring.from_bigint(c, prec)).collect())
}

fn rat_poly(ring: &Arc<PadicRing>, p: &Poly<BigRational>, prec: i64) -> PPoly {
    Poly::new(p.coeffs().iter().map(|c| ring.from_rational(c, prec)).collect())
}

/// Reduces `P(x)·dx/z` on `z² = x³ + a0x + b0` to `(c0, c1)` using
/// `x^{j+2} ≡ −[(2j+1)a0·x^j + 2j·b0·x^{j−1}]/(2j+3)`.
pub fn reduce_x_degree(num: &[PadicScalar], a0: &PadicScalar, b0: &PadicScalar) -> (PadicScalar, PadicScalar) {
    let zero = a0.ring().zero(crate::padic::EXACT_PREC);
    let mut c: Vec<PadicScalar> = num.to_vec();
    while c.len() < 2 {
        c.push(zero.clone());
    }
    for top in (2..c.len()).rev() {
        let cn = c[top].clone();
        let j = (top - 2) as i64;
        let t = cn.div_int(2 * j + 3).neg();
        c[top - 2] = c[top - 2].add(&t.mul(a0).mul_int(2 * j + 1));
        if j >= 1 {
            c[top - 3] = c[top - 3].add(&t.mul(b0).mul_int(2 * j));
        }
    }
    (c[0].clone(), c[1].clone())
}

/// `F0` correct modulo `p^n` (tracked), with working precision escalated
/// until the tracked loss is covered.
pub fn frobenius_on_fiber(c: &FiberCurve, n: i64) -> Result<FiberFrobenius> {
    if n < 1 {
        return Err(Error::PrecisionUnderflow("fibre target precision < 1".into()));
    }
    let k_max = kedlaya_truncation(c.p, n);
    let mut buffer = 4 + k_max as i64 / 2 + 2 * floor_log(c.p, (6 * c.p as usize * (k_max + 2)) as u64) as i64;
    for _ in 0..6 {
        let n_work = n + buffer;
        let f0 = kedlaya_matrix(c, k_max, n_work)?;
        let got = f0.data().iter().map(|x| x.precision()).min().unwrap();
        if got >= n {
            let f0 = f0.map(|x| x.with_cap(n));
            return Ok(FiberFrobenius { f0, n_work });
        }
        if got < 1 && buffer > 64 {
            return Err(Error::PrecisionUnderflow(format!("fibre Frobenius precision {got}")));
        }
        buffer += (n - got).max(2) + 2;
    }
    Err(Error::PrecisionUnderflow("fibre Frobenius: working precision escalation exhausted".into()))
}

/// Raw Kedlaya matrix from the series truncated after `k_max`, computed at
/// precision `n_work` (returned with tracked precision, not capped).
pub fn kedlaya_matrix(c: &FiberCurve, k_max: usize, n_work: i64) -> Result<Matrix<PadicScalar>> {
    let p = c.p;
    let pu = p as usize;
    let ring = PadicRing::new(p, (2 * n_work + 8) as usize);
    let qz = [c.b0.clone(), c.a0.clone(), BigInt::zero(), BigInt::one()];
    let q = exact_poly(&ring, &qz, n_work);
    let dq = q.derivative();
    let qq: Poly<BigRational> = Poly::new(qz.iter().map(|x| BigRational::from_integer(x.clone())).collect());
    let (_, t) = bezout_q(&qq, &qq.derivative());
    let s = rat_poly(&ring, &t, n_work);
    let a0 = ring.from_bigint(&c.a0, n_work);
    let b0 = ring.from_bigint(&c.b0, n_work);

    // E = Q(x^p) − Q(x)^p
    let mut qp = q.clone();
    for _ in 1..p {
        qp = qp.mul(&q);
    }
    let e = q.inflate(pu).sub(&qp);

    let mut cols = Vec::new();
    for i in 0..2 {
        let top = (pu * (2 * k_max + 1) - 1) / 2;
        let mut acc: Vec<PPoly> = vec![Poly::zero(); top + 1];
        let mut ek: PPoly = Poly::new(vec![ring.one(n_work)]);
        for k in 0..=k_max {
            let nk = (pu * (2 * k + 1) - 1) / 2;
            let ck = ring.from_rational(&(half_binomial(k) * BigRational::from_integer(BigInt::from(p))), n_work + 1);
            let mono = Poly::monomial(ck, pu * (i + 1) - 1);
            acc[nk] = acc[nk].add(&mono.mul(&ek));
            if k < k_max {
                ek = ek.mul(&e);
            }
        }
        for nn in (1..=top).rev() {
            let pn = std::mem::replace(&mut acc[nn], Poly::zero());
            if pn.is_empty() {
                continue;
            }
            // P = U·Q + V·Q′ with V = P·s mod Q
            let v = pn.mul(&s).divrem(&q).expect("monic").1;
            let (u, _) = pn.sub(&v.mul(&dq)).divrem(&q).expect("monic");
            let dv = v.derivative().map(|x| x.mul_int(2).div_int(2 * nn as i64 - 1));
            acc[nn - 1] = acc[nn - 1].add(&u.add(&dv));
        }
        let (c0, c1) = reduce_x_degree(acc[0].coeffs(), &a0, &b0);
        cols.push((c0, c1));
    }
    Ok(Matrix::new(2, 2, vec![cols[0].0.clone(), cols[1].0.clone(), cols[0].1.clone(), cols[1].1.clone()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::random_family;
    use crate::padic::ExtField;

    fn check_charpoly(c: &FiberCurve, n: i64) {
        let f = frobenius_on_fiber(c, n).unwrap();
        let ap = c.trace_of_frobenius();
        let ring = f.trace().ring().clone();
        assert!(f.trace().congruent(&ring.from_i64(ap, n)), "trace {} vs {ap}", f.trace());
        assert!(f.det().congruent(&ring.from_i64(c.p as i64, n)), "det {}", f.det());
        assert!(f.precision() >= n);
    }

    #[test]
    fn spec_fibre_p5() {
        let c = FiberCurve::new(5, 1, 1).unwrap();
        assert_eq!(c.affine_count(), 8);
        assert_eq!(c.trace_of_frobenius(), -3);
        check_charpoly(&c, 6);
    }

    #[test]
    fn det_is_p_on_random_fibres() {
        let mut done = 0;
        for seed in 0..40 {
            if done == 20 {
                break;
            }
            let p = [5, 7, 11][seed as usize % 3];
            let f = random_family(p, 6, seed).unwrap();
            let c = FiberCurve::from_family(&f).unwrap();
            check_charpoly(&c, 5);
            done += 1;
        }
        assert_eq!(done, 20);
    }

    #[test]
    fn holomorphic_column_divisible_by_p() {
        for (a, b) in [(1, 1), (2, 3), (3, 5), (0, 1)] {
            let c = FiberCurve::new(7, a, b).unwrap();
            let f = frobenius_on_fiber(&c, 4).unwrap();
            assert!(f.f0.get(0, 0).valuation() >= 1 && f.f0.get(1, 0).valuation() >= 1);
        }
    }

    #[test]
    fn square_predicts_count_over_fp2() {
        let p = 7u64;
        let c = FiberCurve::new(p, 2, 3).unwrap();
        let f = frobenius_on_fiber(&c, 6).unwrap();
        let tr2 = f.f0.mul(&f.f0).trace().to_i64().unwrap();
        // direct count over F_49
        let k = ExtField::primitive(p, 2);
        let elems: Vec<_> = (0..p * p).map(|code| k.from_code(code)).collect();
        let (a, b) = (k.embed(2), k.embed(3));
        let mut sq = std::collections::HashMap::new();
        for z in &elems {
            *sq.entry(k.code(&k.mul(z, z))).or_insert(0u64) += 1;
        }
        let mut count = 0;
        for x in &elems {
            let v = k.add(&k.add(&k.mul(&k.mul(x, x), x), &k.mul(&a, x)), &b);
            count += sq.get(&k.code(&v)).copied().unwrap_or(0);
        }
        assert_eq!(tr2, (p * p) as i64 - count as i64);
    }

    #[test]
    fn truncation_is_stable() {
        let c = FiberCurve::new(5, 2, 1).unwrap();
        let lo = frobenius_on_fiber(&c, 4).unwrap();
        let hi = frobenius_on_fiber(&c, 9).unwrap();
        for (x, y) in lo.f0.data().iter().zip(hi.f0.data()) {
            assert!(x.congruent(y));
        }
    }

    #[test]
    fn rejects_singular_fibre() {
        // x³ − 3x + 2 = (x − 1)²(x + 2)
        assert!(FiberCurve::new(7, -3, 2).is_err());
    }
}
