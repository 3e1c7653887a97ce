//! The sign of the functional equation from the singular fibres.
//!
//! For a semistable `E/F_p(y)` the sign is the global root number
//! `∏_v w_v`, with `w_v = −1` at split and `+1` at non-split multiplicative
//! places and `w_v = 1` at good places.  At a multiplicative place the fibre
//! is the nodal cubic `(x − r)²(x − s)`, `r − s = −9B/(2A)`, which is split
//! iff `χ_v(−2AB) = 1`, so `w_v = −χ_v(−2AB)`.  Since
//! `χ_v(g(y_v)) = χ_p(N(g(y_v))) = χ_p(Res(v, g))` and the resultant is
//! multiplicative in `v`, only the distinct-degree factorization of `Δ` is
//! needed: `W = ∏_k (−1)^{r_k}·χ_p(Res(Δ_k, −2ab))`, with `Δ_k` the product of
//! the `r_k` irreducible factors of degree `k`.

use crate::family::WeierstrassFamily;
use crate::padic::{Fp, Poly};

type FpPoly = Poly<Fp>;

/// `Res(a, b) = lc(a)^{deg b} ∏_{a(α) = 0} b(α)` over `F_p`.
pub fn resultant(a: &FpPoly, b: &FpPoly) -> Fp {
    let p = a.lead().or(b.lead()).map_or(2, |c| c.p);
    let zero = Fp::new(0, p);
    let (Some(m), Some(n)) = (a.degree(), b.degree()) else { return zero };
    if n == 0 {
        return b.lead().unwrap().pow(m as u64);
    }
    if m == 0 {
        return a.lead().unwrap().pow(n as u64);
    }
    if m < n {
        let r = resultant(b, a);
        return if (m * n) % 2 == 1 { -r } else { r };
    }
    // a = qb + r: Res(a, b) = (−1)^{mn} lc(b)^{m − deg r} Res(b, r)
    let (_, r) = a.divrem(b).expect("field");
    let Some(dr) = r.degree() else { return zero };
    let sign = if (m * n) % 2 == 1 { Fp::from_i64(-1, p) } else { Fp::new(1, p) };
    sign * b.lead().unwrap().pow((m - dr) as u64) * resultant(b, &r)
}

/// Distinct-degree factorization of a squarefree polynomial: pairs
/// `(k, Δ_k)` with `Δ_k` the monic product of the irreducible factors of
/// degree `k`.
pub fn distinct_degree_factorization(f: &FpPoly) -> Vec<(usize, FpPoly)> {
    let p = f.lead().expect("nonzero").p;
    let x = Poly::new(vec![Fp::new(0, p), Fp::new(1, p)]);
    let mut rest = f.make_monic();
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut k = 1;
    while rest.degree().is_some_and(|d| d >= 2 * k) {
        h = h.powmod(p, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.degree().is_some_and(|d| d > 0) {
            rest = rest.divrem(&g).expect("field").0;
            h = h.divrem(&rest).expect("field").1;
            out.push((k, g));
        }
        k += 1;
    }
    if let Some(dr) = rest.degree().filter(|&d| d > 0) {
        out.push((dr, rest));
    }
    out
}

/// The root number `∏_v w_v` (the fibre at infinity is good).
pub fn root_number(f: &WeierstrassFamily) -> i8 {
    let p = f.p();
    let w = f.a().mul(f.b()).scale(&Fp::from_i64(-2, p));
    let mut sign = 1i64;
    for (k, dk) in distinct_degree_factorization(f.delta()) {
        let r = dk.degree().unwrap() / k;
        if r % 2 == 1 {
            sign = -sign;
        }
        sign *= resultant(&dk, &w).chi();
    }
    sign as i8
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::random_family;

    #[test]
    fn resultant_of_linear_factors() {
        let p = 7;
        // Res((y−1)(y−2), y−3) = (1−3)(2−3) = 2
        let a = Poly::from_i64s(p, &[2, -3, 1]);
        let b = Poly::from_i64s(p, &[-3, 1]);
        assert_eq!(resultant(&a, &b), Fp::new(2, p));
        assert_eq!(resultant(&b, &a), Fp::new(2, p));
    }

    #[test]
    fn ddf_degrees_sum() {
        for seed in 0..5 {
            let f = random_family(7, 6, seed).unwrap();
            let parts = distinct_degree_factorization(f.delta());
            let total: usize = parts.iter().map(|(_, g)| g.degree().unwrap()).sum();
            assert_eq!(total, 12);
            for (k, g) in parts {
                assert_eq!(g.degree().unwrap() % k, 0);
            }
        }
    }
}
