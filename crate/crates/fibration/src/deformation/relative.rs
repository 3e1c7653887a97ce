//! Relative reduction of `A·dx/(2z)` and the relative Frobenius `F(y)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::horizontal::{horizontal_solution, mat2_adj, mat2_mul, min_valuation, padic_connection, Mat2, MatSeries, PPoly};
use crate::error::{Error, Result};
use crate::family::{floor_log, WeierstrassFamily};
use crate::fiber::{frobenius_on_fiber, FiberCurve};
use crate::gauss_manin::{connection_matrix, QPoly};
use crate::padic::{PadicRing, PadicScalar, Poly, EXACT_PREC};

/// Result of a relative reduction, with its exactness certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeClass {
    pub c0: QPoly,
    pub c1: QPoly,
    /// `h(x, y)` with `A − 2(c0 + c1·x) = 2h_x·Q + h·Q_x`, i.e. the
    /// subtracted form is `d(h·z)`; `h[j]` is the coefficient of `x^j`.
    pub h: Vec<QPoly>,
}

fn qc(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Class of `A(x, y)·dx/(2z)` in relative `H¹` on the basis
/// `(dx/z, x dx/z)`; `xs[i]` is the coefficient of `x^i`.
pub fn relative_reduce(xs: &[QPoly], a: &QPoly, b: &QPoly) -> RelativeClass {
    let mut xs: Vec<QPoly> = xs.to_vec();
    while xs.len() < 2 {
        xs.push(Poly::zero());
    }
    let mut h = vec![Poly::zero(); xs.len().saturating_sub(2).max(1)];
    for n in (2..xs.len()).rev() {
        let c = std::mem::replace(&mut xs[n], Poly::zero());
        if c.is_empty() {
            continue;
        }
        let j = (n - 2) as i64;
        let cj = c.scale(&qc(2 * j + 3).recip());
        xs[n - 2] = xs[n - 2].sub(&cj.mul(a).scale(&qc(2 * j + 1)));
        if j >= 1 {
            xs[n - 3] = xs[n - 3].sub(&cj.mul(b).scale(&qc(2 * j)));
        }
        h[n - 2] = h[n - 2].add(&cj);
    }
    let half = qc(2).recip();
    RelativeClass { c0: xs[0].scale(&half), c1: xs[1].scale(&half), h }
}

/// Relative class of the monomial `x^i y^j dx/(2z)`.
pub fn relative_reduce_monomial(f: &WeierstrassFamily, i: usize, j: usize) -> RelativeClass {
    let (a, b) = family_q(f);
    let mut xs = vec![Poly::zero(); i + 1];
    xs[i] = Poly::monomial(qc(1), j);
    relative_reduce(&xs, &a, &b)
}

pub fn family_q(f: &WeierstrassFamily) -> (QPoly, QPoly) {
    let conv = |v: Vec<i64>| Poly::new(v.into_iter().map(qc).collect());
    (conv(f.lifted_a()), conv(f.lifted_b()))
}

/// `F(y) = G(y)/Δ(y)^M`, the relative Frobenius on `(dx/z, x dx/z)`.
#[derive(Clone, Debug)]
pub struct RelFrobenius {
    /// Row-major entries of `G`, each of degree `≤ gcut`.
    pub g: [PPoly; 4],
    pub m: usize,
    /// `deg G − M·deg Δ`: the pole order of `F` at infinity.
    pub pole_at_infinity: i64,
    /// Minimum valuation of the discarded tail of `Δ^M·F`.
    pub tail_valuation: i64,
    /// Absolute precision of `G` (capped at the tail valuation).
    pub precision: i64,
    /// The series `F(y) mod y^D` it was reconstructed from.
    pub series: MatSeries,
    pub f0: Mat2,
}

/// Degree cut-off for `G`: `M·deg Δ + 2(p+1)e`.
pub fn g_cutoff(p: u64, d: usize, m: usize) -> usize {
    2 * d * m + 2 * (p as usize + 1) * (d / 6)
}

/// Series length used for a given largest `M`: the `G` cut-off plus
/// `p·deg Δ` coefficients of tail to inspect.
pub fn series_length(p: u64, d: usize, m_max: usize) -> usize {
    g_cutoff(p, d, m_max) + p as usize * 2 * d + 1
}

/// `ord_p(n!)`.
pub fn ord_factorial(p: u64, n: u64) -> i64 {
    let (mut s, mut q) = (0u64, n / p);
    while q > 0 {
        s += q;
        q /= p;
    }
    s as i64
}

/// `F = C·F0·C(y^p)^{-1}` to `len` terms (`det C = 1`, so the inverse is
/// the adjugate).
pub fn frobenius_series(c: &MatSeries, f0: &Mat2, p: usize, len: usize) -> MatSeries {
    let ring = f0[0].ring().clone();
    let zero = ring.zero(EXACT_PREC);
    let cf: Vec<Mat2> = c.iter().take(len).map(|ci| mat2_mul(ci, f0)).collect();
    let adj: Vec<Mat2> = c.iter().take(len.div_ceil(p)).map(mat2_adj).collect();
    (0..len)
        .map(|n| {
            std::array::from_fn(|k| {
                let (r, col) = (k / 2, k % 2);
                let mut pairs = Vec::new();
                for (j, aj) in adj.iter().enumerate() {
                    if p * j > n {
                        break;
                    }
                    let left = &cf[n - p * j];
                    for t in 0..2 {
                        pairs.push((&left[2 * r + t], &aj[2 * t + col]));
                    }
                }
                PadicScalar::dot(&zero, pairs)
            })
        })
        .collect()
}

fn series_times_poly(s: &[PadicScalar], q: &PPoly, len: usize) -> Vec<PadicScalar> {
    let zero = q.coeffs()[0].ring().zero(EXACT_PREC);
    (0..len)
        .map(|t| {
            let lo = t.saturating_sub(q.len() - 1);
            PadicScalar::dot(&zero, (lo..=t).filter(|&i| i < s.len()).map(|i| (&s[i], &q.coeffs()[t - i])))
        })
        .collect()
}

/// Reconstructs `G = Δ^M·F` for the first `M ∈ {m_start, m_start + (p−1), …} ≤ m_max`
/// whose discarded tail has valuation `≥ target`.
pub fn reconstruct(
    series: &MatSeries,
    delta: &PPoly,
    p: u64,
    d: usize,
    m_start: usize,
    m_max: usize,
    target: i64,
) -> Result<(usize, [PPoly; 4], i64, i64)> {
    let len = series.len();
    let step = (p - 1) as usize;
    let dpow = |k: usize| (1..k.max(1)).fold(delta.clone(), |acc, _| acc.mul(delta));
    let dm = dpow(m_start);
    let mut cur: Vec<Vec<PadicScalar>> =
        (0..4).map(|k| series_times_poly(&series.iter().map(|m| m[k].clone()).collect::<Vec<_>>(), &dm, len)).collect();
    let dstep = dpow(step);
    let mut m = m_start;
    loop {
        let gcut = g_cutoff(p, d, m);
        if gcut + 1 >= len {
            break;
        }
        let tail = cur
            .iter()
            .flat_map(|e| e[gcut + 1..].iter())
            .map(|x| if x.is_zero() { x.precision() } else { x.valuation().min(x.precision()) })
            .min()
            .unwrap_or(EXACT_PREC);
        if tail >= target {
            let prec = cur.iter().flat_map(|e| e[..=gcut].iter()).map(|x| x.precision()).min().unwrap();
            let cap = prec.min(tail);
            let g: [PPoly; 4] = std::array::from_fn(|k| Poly::new(cur[k][..=gcut].iter().map(|x| x.with_cap(cap)).collect()));
            let top = g
                .iter()
                .filter_map(|e| e.coeffs().iter().rposition(|x| !x.is_zero()))
                .max()
                .map(|t| t as i64)
                .unwrap_or(0);
            let pole = top - (2 * d * m) as i64;
            return Ok((m, g, tail, pole));
        }
        if m + step > m_max {
            break;
        }
        m += step;
        cur = cur.iter().map(|e| series_times_poly(e, &dstep, len)).collect();
    }
    Err(Error::NoStabilization(m_max))
}

/// Tuning for [`relative_frobenius`].
#[derive(Clone, Copy, Debug)]
pub struct RelFrobeniusPlan {
    /// Required absolute precision of `G`.
    pub target: i64,
    pub m_start: usize,
    pub m_max: usize,
}

impl RelFrobeniusPlan {
    /// Starts at `M = (p−1)·target`, allowing a few escalation steps.
    pub fn for_target(p: u64, target: i64) -> Self {
        let step = (p - 1) as usize;
        let m_start = step * target.max(1) as usize;
        RelFrobeniusPlan { target, m_start, m_max: m_start + 3 * step }
    }
}

/// Working precision for a series of length `len` whose coefficients must
/// end up correct to `n`: covers `ord_p(len!)` from the recurrence plus the
/// valuation dips of `C` and `C(y^p)^{-1}`.
pub fn series_work_precision(p: u64, len: usize, n: i64) -> i64 {
    n + ord_factorial(p, len as u64) + 2 * (floor_log(p, len as u64) as i64 + 1) + 4
}

/// Solves for `F(y)` at `y = 0` and reconstructs `G = Δ^M·F`.
pub fn relative_frobenius(f: &WeierstrassFamily, plan: RelFrobeniusPlan) -> Result<RelFrobenius> {
    let p = f.p();
    let d = f.d();
    let len = series_length(p, d, plan.m_max);
    let n_f = plan.target + 1;
    let n_work = series_work_precision(p, len, n_f);
    let ring = PadicRing::new(p, (n_work + 8) as usize);
    let conn = connection_matrix(f);
    let c = horizontal_solution(&ring, &conn, len, n_work)?;
    let lambda = (-min_valuation(&c)).max(0);
    let fib = FiberCurve::from_family(f)?;
    let fr = frobenius_on_fiber(&fib, n_f + 2 * lambda + 1)?;
    let f0: Mat2 = std::array::from_fn(|k| rebase(&ring, fr.f0.get(k / 2, k % 2)));
    // C only needs enough digits to feed the products at precision n_f
    let cap_c = n_f + 2 * lambda + 2;
    let c: MatSeries = c.into_iter().map(|m| m.map(|x| x.with_cap(cap_c))).collect();
    let series: MatSeries = frobenius_series(&c, &f0, p as usize, len).into_iter().map(|m| m.map(|x| x.with_cap(n_f))).collect();
    let (_, delta) = padic_connection(&ring, &conn, n_f + 2);
    let (m, g, tail, pole) = reconstruct(&series, &delta, p, d, plan.m_start, plan.m_max, plan.target)?;
    let precision = g.iter().flat_map(|e| e.coeffs().iter()).map(|x| x.precision()).min().unwrap_or(0);
    if precision < 1 {
        return Err(Error::PrecisionUnderflow(format!("relative Frobenius precision {precision}")));
    }
    Ok(RelFrobenius { g, m, pole_at_infinity: pole, tail_valuation: tail, precision, series, f0 })
}

/// Re-homes a scalar into another ring of the same prime.
pub fn rebase(ring: &Arc<PadicRing>, x: &PadicScalar) -> PadicScalar {
    if x.is_zero() {
        return ring.zero(x.precision());
    }
    let r = x.to_rational();
    ring.from_rational(&r, x.precision())
}

/// Evaluates `F(y0) = G(y0)/Δ(y0)^M` at the Teichmüller lift of `y0 ∈ F_p`.
pub fn specialize(rel: &RelFrobenius, f: &WeierstrassFamily, y0: u64) -> Result<Mat2> {
    let p = f.p();
    let prec = rel.precision;
    let ring = rel.g[0].coeffs()[0].ring().clone();
    let t = teichmuller(&ring, y0 % p, prec);
    let delta = f.lifted_delta();
    let dv = Poly::new(delta.coeffs().iter().map(|x| ring.from_bigint(x, prec)).collect::<Vec<_>>())
        .eval(&t)
        .unwrap_or_else(|| ring.zero(prec));
    let dinv = dv.inv_unit().map_err(|_| Error::InvalidFamily(format!("Δ({y0}) ≡ 0 mod p")))?;
    let scale = dinv.pow(rel.m as u32);
    Ok(std::array::from_fn(|k| rel.g[k].eval(&t).unwrap_or_else(|| ring.zero(prec)).mul(&scale)))
}

/// Teichmüller lift of `a ∈ F_p` modulo `p^prec`.
pub fn teichmuller(ring: &Arc<PadicRing>, a: u64, prec: i64) -> PadicScalar {
    let mut t = ring.from_i64(a as i64, prec);
    if a == 0 {
        return t;
    }
    for _ in 0..prec + 1 {
        t = t.pow(ring.p() as u32);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::random_family;

    fn qp(cs: &[i64]) -> QPoly {
        Poly::new(cs.iter().map(|&c| qc(c)).collect())
    }

    #[test]
    fn trivial_reductions() {
        let (a, b) = (qp(&[1, 2]), qp(&[3, 0, 1]));
        let r = relative_reduce(&[qp(&[1])], &a, &b);
        assert_eq!((r.c0, r.c1), (qp(&[]).add(&Poly::new(vec![qc(1) / qc(2)])), qp(&[])));
        let r = relative_reduce(&[qp(&[]), qp(&[1])], &a, &b);
        assert_eq!((r.c0, r.c1), (qp(&[]), Poly::new(vec![qc(1) / qc(2)])));
    }

    #[test]
    fn certificate_reexpands_to_input() {
        let f = random_family(5, 6, 2).unwrap();
        let (a, b) = family_q(&f);
        // A = x²·(anything) + extra
        let xs = vec![qp(&[1, 2]), qp(&[0, 3]), qp(&[4, 0, 1]), qp(&[]), qp(&[2]), qp(&[0, 0, 0, 5])];
        let r = relative_reduce(&xs, &a, &b);
        // Q = x³ + a x + b as x-polynomial with y-coefficients
        let q = [b.clone(), a.clone(), qp(&[]), qp(&[1])];
        let qx = [a.clone(), qp(&[]), qp(&[3])];
        let mut lhs = xs.clone();
        lhs.resize(8, qp(&[]));
        lhs[0] = lhs[0].sub(&r.c0.scale(&qc(2)));
        lhs[1] = lhs[1].sub(&r.c1.scale(&qc(2)));
        let mut rhs = vec![qp(&[]); 8];
        for (j, hj) in r.h.iter().enumerate() {
            // 2 h_x Q
            if j >= 1 {
                for (t, qt) in q.iter().enumerate() {
                    rhs[j - 1 + t] = rhs[j - 1 + t].add(&hj.mul(qt).scale(&qc(2 * j as i64)));
                }
            }
            for (t, qt) in qx.iter().enumerate() {
                rhs[j + t] = rhs[j + t].add(&hj.mul(qt));
            }
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn series_solves_frobenius_ode() {
        let f = random_family(5, 6, 7).unwrap();
        let rel = relative_frobenius(&f, RelFrobeniusPlan::for_target(5, 3)).unwrap();
        let s = &rel.series;
        let p = 5usize;
        let ring = s[0][0].ring().clone();
        // F(0) = F0
        for k in 0..4 {
            assert!(s[0][k].congruent(&rel.f0[k]));
        }
        assert!(rel.pole_at_infinity <= 6 * (f.d() / 6) as i64);
        // Δ(y^p)·(Δ F′ + β F) = p y^{p−1} Δ(y) F β(y^p), checked on y-coefficients < 40
        let conn = connection_matrix(&f);
        let (beta, delta) = padic_connection(&ring, &conn, 20);
        let cut = 40;
        let sp = |k: usize| -> PPoly { Poly::new(s.iter().take(cut + 2).map(|m| m[k].clone()).collect()) };
        let fs: Vec<PPoly> = (0..4).map(sp).collect();
        let mm = |a: &[PPoly], b: &[PPoly]| -> Vec<PPoly> {
            (0..4).map(|k| a[2 * (k / 2)].mul(&b[k % 2]).add(&a[2 * (k / 2) + 1].mul(&b[2 + k % 2]))).collect()
        };
        let dfs: Vec<PPoly> = fs.iter().map(|x| x.derivative().mul(&delta)).collect();
        let lhs0: Vec<PPoly> = mm(&beta, &fs).iter().zip(&dfs).map(|(x, y)| x.add(y)).collect();
        let dp = delta.inflate(p);
        let lhs: Vec<PPoly> = lhs0.iter().map(|x| x.mul(&dp)).collect();
        let bp: Vec<PPoly> = beta.iter().map(|x| x.inflate(p)).collect();
        let shift = Poly::monomial(ring.from_i64(p as i64, 60), p - 1);
        let rhs: Vec<PPoly> = mm(&fs, &bp).iter().map(|x| x.mul(&delta).mul(&shift)).collect();
        for k in 0..4 {
            for t in 0..cut {
                let diff = lhs[k].coeff(t).unwrap().sub(rhs[k].coeff(t).unwrap());
                assert!(diff.is_zero(), "k={k} t={t}");
            }
        }
    }

    #[test]
    fn specialization_matches_fibre_counts() {
        for (p, seed) in [(5u64, 1u64), (7, 4)] {
            let f = random_family(p, 6, seed).unwrap();
            let rel = relative_frobenius(&f, RelFrobeniusPlan::for_target(p, 3)).unwrap();
            let mut checked = 0;
            for y0 in 0..p {
                let (a0, b0) = f.fiber_at(y0 as i64);
                let Ok(fib) = FiberCurve::new(p, a0.signed(), b0.signed()) else { continue };
                let m = specialize(&rel, &f, y0).unwrap();
                let tr = m[0].add(&m[3]);
                let ring = tr.ring().clone();
                let want = ring.from_i64(fib.trace_of_frobenius(), tr.precision());
                assert!(tr.congruent(&want), "p={p} y0={y0} tr={tr} want {}", fib.trace_of_frobenius());
                let det = m[0].mul(&m[3]).sub(&m[1].mul(&m[2]));
                assert!(det.congruent(&ring.from_i64(p as i64, det.precision())));
                checked += 1;
            }
            assert!(checked >= 2);
        }
    }

    #[test]
    #[ignore]
    fn tail_profile() {
        for p in [5u64, 7] {
            let f = random_family(p, 6, 3).unwrap();
            for target in [2i64, 4, 6, 8] {
                let t = std::time::Instant::now();
                let r = relative_frobenius(&f, RelFrobeniusPlan::for_target(p, target));
                match r {
                    Ok(r) => eprintln!(
                        "p={p} target={target} M={} tail={} prec={} pole={} {:?}",
                        r.m,
                        r.tail_valuation,
                        r.precision,
                        r.pole_at_infinity,
                        t.elapsed()
                    ),
                    Err(e) => eprintln!("p={p} target={target} err {e}"),
                }
            }
        }
    }
}

