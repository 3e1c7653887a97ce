//! Power-series fundamental solution of the Gauss–Manin system at `y = 0`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gauss_manin::ConnectionData;
use crate::padic::{PadicRing, PadicScalar, Poly, EXACT_PREC};

/// A 2×2 matrix, row-major.
pub type Mat2 = [PadicScalar; 4];

/// Matrix power series `Σ_i c_i y^i`, truncated.
pub type MatSeries = Vec<Mat2>;

pub type PPoly = Poly<PadicScalar>;

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let z = a[0].ring().zero(EXACT_PREC);
    std::array::from_fn(|k| {
        let (r, c) = (k / 2, k % 2);
        PadicScalar::dot(&z, [(&a[2 * r], &b[c]), (&a[2 * r + 1], &b[2 + c])])
    })
}

/// `adj(m)`, the inverse up to `det m`.
pub fn mat2_adj(m: &Mat2) -> Mat2 {
    [m[3].clone(), m[1].neg(), m[2].neg(), m[0].clone()]
}

pub fn mat2_det(m: &Mat2) -> PadicScalar {
    m[0].mul(&m[3]).sub(&m[1].mul(&m[2]))
}

/// `β` and `Δ` as exact-data p-adic polynomials at precision `n`.
pub fn padic_connection(ring: &Arc<PadicRing>, c: &ConnectionData, n: i64) -> ([PPoly; 4], PPoly) {
    let conv = |p: &Poly<num_bigint::BigInt>, half: bool| -> PPoly {
        Poly::new(
            p.coeffs()
                .iter()
                .map(|x| {
                    let s = ring.from_bigint(x, n + 1);
                    if half {
                        s.div_int(2).with_cap(n)
                    } else {
                        s.with_cap(n)
                    }
                })
                .collect(),
        )
    };
    (std::array::from_fn(|k| conv(&c.beta2[k], true)), conv(&c.delta, false))
}

/// Solves `C′ = −β/Δ·C`, `C(0) = I` to `D` terms at working precision `n`.
///
/// From `Δ·C′ = −β·C`:
/// `(i+1)Δ_0·C_{i+1} = −Σ_j β_j C_{i−j} − Σ_{j≥1} (i+1−j) Δ_j C_{i+1−j}`.
pub fn horizontal_solution(ring: &Arc<PadicRing>, c: &ConnectionData, d: usize, n: i64) -> Result<MatSeries> {
    let (beta, delta) = padic_connection(ring, c, n);
    horizontal_from(ring, &beta, &delta, d, n)
}

pub fn horizontal_from(ring: &Arc<PadicRing>, beta: &[PPoly; 4], delta: &PPoly, d: usize, n: i64) -> Result<MatSeries> {
    let d0_inv = delta
        .coeff(0)
        .and_then(|x| x.inv_unit().ok())
        .ok_or_else(|| Error::InvalidFamily("Δ(0) is not a p-adic unit".into()))?;
    let zero = ring.zero(EXACT_PREC);
    let one = ring.one(n);
    let mut c: MatSeries = Vec::with_capacity(d);
    if d == 0 {
        return Ok(c);
    }
    c.push([one.clone(), ring.zero(n), ring.zero(n), one]);
    for i in 0..d.saturating_sub(1) {
        let mut next: Vec<PadicScalar> = Vec::with_capacity(4);
        for k in 0..4 {
            let (r, col) = (k / 2, k % 2);
            let mut pairs: Vec<(&PadicScalar, &PadicScalar)> = Vec::new();
            let mut scaled: Vec<(PadicScalar, &PadicScalar)> = Vec::new();
            for j in 0..=i {
                let ci = &c[i - j];
                for t in 0..2 {
                    if let Some(b) = beta[2 * r + t].coeff(j) {
                        pairs.push((b, &ci[2 * t + col]));
                    }
                }
            }
            for j in 1..=(i + 1).min(delta.len().saturating_sub(1)) {
                if let Some(dj) = delta.coeff(j) {
                    scaled.push((dj.mul_int((i + 1 - j) as i64), &c[i + 1 - j][k]));
                }
            }
            let s1 = PadicScalar::dot(&zero, pairs);
            let s2 = PadicScalar::dot(&zero, scaled.iter().map(|(a, b)| (a, *b)));
            next.push(s1.add(&s2).neg().mul(&d0_inv).div_int((i + 1) as i64));
        }
        c.push([next[0].clone(), next[1].clone(), next[2].clone(), next[3].clone()]);
    }
    Ok(c)
}

/// Minimum valuation over all coefficients (the `−λ` of a series).
pub fn min_valuation(s: &MatSeries) -> i64 {
    s.iter().flat_map(|m| m.iter()).filter(|x| !x.is_zero()).map(|x| x.valuation()).min().unwrap_or(0)
}

/// Minimum absolute precision over all coefficients.
pub fn min_precision(s: &MatSeries) -> i64 {
    s.iter().flat_map(|m| m.iter()).map(|x| x.precision()).min().unwrap_or(EXACT_PREC)
}
