//! From `Ã` to the integer L-polynomial.
//!
//! `det(1 − ÃT) = L(T)·(1 − a_∞pT + p³T²)`: the lattice also carries
//! `H¹(D)(−1)` of the fibre at infinity, whose factor is divided out exactly.
//! The low half of `L` is pinned by the precision bounds and the Weil bound;
//! the functional equation `a_{m−ℓ} = ε·p^{m−2ℓ}·a_ℓ` fills in the rest, with
//! coefficient `m/2 + 1` deciding `ε`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::deformation::FrobeniusOnLattice;
use crate::error::{Error, Result};
use crate::family::{weighted_params, WeierstrassFamily};
use crate::padic::{bigint_val, Fp, Matrix, Poly};
use crate::precision::{guaranteed_precision, HodgeShape, EXACT_COEFF};

type QPoly = Poly<BigRational>;

/// A rational number known modulo `p^precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxCoeff {
    pub value: BigRational,
    pub precision: i64,
}

/// An L-polynomial `1 + a_1T + … + a_mT^m` with its functional-equation
/// sign and analytic rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilPolynomial {
    pub p: u64,
    pub coeffs: Vec<BigInt>,
    pub epsilon: i8,
    pub analytic_rank: usize,
}

impl WeilPolynomial {
    /// Validates exact coefficients: `a_0 = 1`, the coefficient identity for
    /// the sign read from `a_m`, and the root moduli.
    pub fn from_coeffs(coeffs: Vec<BigInt>, p: u64) -> Result<Self> {
        let m = coeffs.len() - 1;
        if !coeffs[0].is_one() {
            return Err(Error::InvalidParameters("a_0 ≠ 1".into()));
        }
        let pm = BigInt::from(p).pow(m as u32);
        let epsilon = if coeffs[m] == pm {
            1
        } else if coeffs[m] == -pm {
            -1
        } else {
            return Err(Error::NoConsistentSign);
        };
        if !functional_equation_holds(&coeffs, p, epsilon) {
            return Err(Error::NoConsistentSign);
        }
        check_root_moduli(&coeffs, p, epsilon)?;
        let analytic_rank = analytic_rank(&coeffs, p);
        Ok(WeilPolynomial { p, coeffs, epsilon, analytic_rank })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// `a_{m−ℓ} = ε·p^{m−2ℓ}·a_ℓ` for all `ℓ ≤ m/2`.
///
/// From `(pT)^m L(1/(p²T)) = ∏(−α_i/p)·L(T)` when the reciprocal roots are
/// stable under `α ↦ p²/α`; pairs contribute `1` to the product and the
/// fixed roots `±p` contribute `∓1`, so `ε = (−1)^{mult(p)}`.
pub fn functional_equation_holds(a: &[BigInt], p: u64, eps: i8) -> bool {
    let m = a.len() - 1;
    let pb = BigInt::from(p);
    (0..=m / 2).all(|l| a[m - l] == BigInt::from(eps) * pb.pow((m - 2 * l) as u32) * &a[l])
}

/// The normalized characteristic polynomial and the low half of `L(T)`.
#[derive(Clone, Debug)]
pub struct NormalizedCharpoly {
    /// Coefficients of `det(1 − p^{-1}ÃT)`, with the guaranteed precision.
    pub normalized: Vec<ApproxCoeff>,
    /// `a_0 … a_{m/2+1}` of `L(T)`.
    pub l_low: Vec<ApproxCoeff>,
    /// `ε = a_m/p^m`, read off `det(p^{-1}Ã) = ε·p`.
    pub sign_coeff: ApproxCoeff,
    /// Trace of Frobenius on the fibre at infinity.
    pub a_infinity: i64,
    /// The `N` used in the precision bounds (`Ã` correct modulo `p^{N+1}`).
    pub n_effective: i64,
}

/// `−Σ_u χ(u³ + lc(b))`: the fibre at infinity is `w² = u³ + lc(b)`.
pub fn trace_at_infinity(f: &WeierstrassFamily) -> i64 {
    let p = f.p();
    let lb = *f.b().lead().expect("b ≠ 0");
    -(0..p)
        .map(|u| {
            let u = Fp::new(u, p);
            (u * u * u + lb).chi()
        })
        .sum::<i64>()
}

/// Coefficients of `det(1 − MT)` for a rational matrix (Berkowitz).
pub fn reversed_charpoly(m: &Matrix<BigRational>) -> Vec<BigRational> {
    let n = m.rows();
    let cp = m.charpoly();
    (0..=n).map(|l| cp.coeff(n - l).cloned().unwrap_or_else(BigRational::zero)).collect()
}

/// `det(1 − p^{-1}ÃT)` with per-coefficient precision, and `L(T)` to the
/// precision the recovery needs.
pub fn normalized_charpoly(fl: &FrobeniusOnLattice, f: &WeierstrassFamily) -> Result<NormalizedCharpoly> {
    normalized_charpoly_k(fl, f, weighted_params(f).k_lattice)
}

/// As [`normalized_charpoly`], with the lattice index `k` of the bounds given.
pub fn normalized_charpoly_k(fl: &FrobeniusOnLattice, f: &WeierstrassFamily, k: usize) -> Result<NormalizedCharpoly> {
    let p = f.p();
    let d = f.d();
    let dim = fl.a_tilde.rows();
    if dim != 2 * d - 2 {
        return Err(Error::UnexpectedDimension { found: dim, expected: 2 * d - 2 });
    }
    let shape = HodgeShape::for_degree(d);
    let n_eff = fl.n_delivered - fl.basis_change_valuation - 1;
    if n_eff < 2 {
        return Err(Error::InsufficientPrecision(format!(
            "Ã delivered to p^{} (basis change −{}), need N ≥ 2",
            fl.n_delivered, fl.basis_change_valuation
        )));
    }
    let a = fl.a_tilde.map(|x| x.to_rational());
    let c = reversed_charpoly(&a);
    let pb = BigInt::from(p);
    let mut normalized = Vec::with_capacity(dim + 1);
    let mut prec = Vec::with_capacity(dim + 1);
    for (l, cl) in c.iter().enumerate() {
        let b = guaranteed_precision(n_eff, l, &shape, p, k)?.sound;
        prec.push(b);
        normalized.push(ApproxCoeff { value: cl / BigRational::from_integer(pb.pow(l as u32)), precision: b });
    }
    // L(T) = det(1 − ÃT) / (1 − a_∞pT + p³T²)
    let a_inf = trace_at_infinity(f);
    let mlen = 2 * d - 4;
    let top = mlen / 2 + 1;
    let (d1, d2) = (BigRational::from_integer(BigInt::from(a_inf) * &pb), BigRational::from_integer(pb.pow(3)));
    let mut l_vals: Vec<BigRational> = Vec::with_capacity(top + 1);
    let mut l_low = Vec::with_capacity(top + 1);
    let mut run = EXACT_COEFF;
    for l in 0..=top {
        let mut v = c[l].clone();
        if l >= 1 {
            v += &d1 * &l_vals[l - 1];
        }
        if l >= 2 {
            v -= &d2 * &l_vals[l - 2];
        }
        run = run.min(prec[l]);
        l_low.push(ApproxCoeff { value: v.clone(), precision: if l == 0 { EXACT_COEFF } else { l as i64 + run } });
        l_vals.push(v);
    }
    // the trivial factor contributes p to the top coefficient
    let last = &normalized[dim];
    let sign_coeff = ApproxCoeff { value: &last.value / BigRational::from_integer(pb.clone()), precision: last.precision - 1 };
    Ok(NormalizedCharpoly { normalized, l_low, sign_coeff, a_infinity: a_inf, n_effective: n_eff })
}

/// Residue of a p-integral rational modulo `p^e`, lifted to `(−p^e/2, p^e/2]`.
fn symmetric_residue(x: &BigRational, p: u64, e: i64) -> Result<BigInt> {
    let modulus = BigInt::from(p).pow(e as u32);
    if bigint_val(x.denom(), p) > 0 {
        return Err(Error::InsufficientPrecision("coefficient is not p-integral".into()));
    }
    let dinv = mod_inverse(x.denom(), &modulus).ok_or_else(|| Error::InsufficientPrecision("denominator".into()))?;
    let mut r = (x.numer() * dinv).mod_floor(&modulus);
    if &r * 2 > modulus {
        r -= &modulus;
    }
    Ok(r)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Recovers `L(T)` from its low half known to the given precisions.
///
/// The sign comes from the redundant coefficient `a_{m/2+1}`; when both
/// signs fit, [`recover_weil_polynomial_signed`] can break the tie.
pub fn recover_weil_polynomial(approx: &[ApproxCoeff], d: usize, p: u64) -> Result<WeilPolynomial> {
    recover_weil_polynomial_signed(approx, None, d, p)
}

/// `x ≡ target (mod p^prec)` for a p-integral rational `x`.
fn congruent(x: &BigRational, target: i64, p: u64, prec: i64) -> bool {
    let diff = x - BigRational::from_integer(BigInt::from(target));
    diff.is_zero() || bigint_val(diff.numer(), p) - bigint_val(diff.denom(), p) >= prec
}

/// As [`recover_weil_polynomial`], with `ε` also known modulo `p^prec`
/// from the top coefficient.  The top coefficient decides when the middle
/// ones leave both signs open, and must agree otherwise.
pub fn recover_weil_polynomial_signed(approx: &[ApproxCoeff], sign: Option<&ApproxCoeff>, d: usize, p: u64) -> Result<WeilPolynomial> {
    let m = 2 * d - 4;
    let half = m / 2;
    if approx.len() < half + 2 {
        return Err(Error::InsufficientPrecision(format!("{} coefficients, need {}", approx.len(), half + 2)));
    }
    let pb = BigInt::from(p);
    let mut low: Vec<BigInt> = vec![BigInt::one()];
    for (l, c) in approx.iter().enumerate().take(half + 2).skip(1) {
        let bound = binomial(BigInt::from(m), BigInt::from(l)) * pb.pow(l as u32);
        if c.precision <= 0 || pb.pow(c.precision.min(1 << 20) as u32) <= &bound * 2 {
            return Err(Error::InsufficientPrecision(format!("a_{l} known mod p^{}, need > 2·{bound}", c.precision)));
        }
        let a = symmetric_residue(&c.value, p, c.precision)?;
        if a.abs() > bound {
            return Err(Error::WeilBoundViolation(l));
        }
        low.push(a);
    }
    let mut passing = Vec::new();
    let mut consistent = 0;
    for eps in [1i8, -1] {
        if eps == -1 && !low[half].is_zero() {
            continue;
        }
        let predicted = BigInt::from(eps) * pb.pow(2) * &low[half - 1];
        if predicted != low[half + 1] {
            continue;
        }
        consistent += 1;
        let mut coeffs = vec![BigInt::zero(); m + 1];
        for l in 0..=half {
            coeffs[l] = low[l].clone();
            coeffs[m - l] = BigInt::from(eps) * pb.pow((m - 2 * l) as u32) * &low[l];
        }
        if let Ok(w) = WeilPolynomial::from_coeffs(coeffs, p) {
            passing.push(w);
        }
    }
    // ±1 are distinct modulo p, so one digit of ε suffices
    let known_sign = sign.filter(|s| s.precision >= 1);
    if let Some(s) = known_sign {
        if !congruent(&s.value, 1, p, 1) && !congruent(&s.value, -1, p, 1) {
            return Err(Error::NoConsistentSign);
        }
        passing.retain(|w| congruent(&s.value, w.epsilon as i64, p, s.precision.min(1 << 20)));
        if consistent > 0 && passing.is_empty() {
            return Err(Error::NoConsistentSign);
        }
    }
    match (consistent, passing.len()) {
        (0, _) => Err(Error::NoConsistentSign),
        (_, 0) => Err(Error::RootModulusFailure("no sign gives roots of modulus p".into())),
        (_, 1) => Ok(passing.pop().unwrap()),
        _ if sign.is_some() => Err(Error::InsufficientPrecision("ε not determined by the top coefficient".into())),
        _ => Err(Error::SignAmbiguity),
    }
}

/// Largest `r` with `(1 − pT)^r | L(T)`, by exact synthetic division.
pub fn analytic_rank(coeffs: &[BigInt], p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut cur = coeffs.to_vec();
    let mut r = 0;
    while cur.len() > 1 {
        // cur = (1 − pT)·q: q_0 = c_0, q_i = c_i + p·q_{i−1}
        let mut q = Vec::with_capacity(cur.len() - 1);
        let mut prev = BigInt::zero();
        for c in &cur[..cur.len() - 1] {
            prev = c + &pb * &prev;
            q.push(prev.clone());
        }
        if !(cur.last().unwrap() + &pb * &prev).is_zero() {
            break;
        }
        cur = q;
        r += 1;
    }
    r
}

fn qpoly(cs: impl IntoIterator<Item = BigInt>) -> QPoly {
    Poly::new(cs.into_iter().map(BigRational::from_integer).collect())
}

fn qgcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = x.divrem(&y).expect("nonzero divisor").1;
        x = std::mem::replace(&mut y, r);
    }
    let lead = x.lead().cloned().unwrap_or_else(BigRational::one);
    x.scale(&lead.recip())
}

fn squarefree(a: &QPoly) -> QPoly {
    let g = qgcd(a, &a.derivative());
    a.divrem(&g).expect("nonzero").0
}

fn eval_q(a: &QPoly, x: &BigRational) -> BigRational {
    a.eval(x).unwrap_or_else(BigRational::zero)
}

/// Number of distinct real roots of a squarefree `a` in `(lo, hi]`.
fn sturm_count(a: &QPoly, lo: &BigRational, hi: &BigRational) -> usize {
    let mut seq = vec![a.clone(), a.derivative()];
    while !seq.last().unwrap().is_empty() {
        let n = seq.len();
        let r = seq[n - 2].divrem(&seq[n - 1]).expect("nonzero").1;
        if r.is_empty() {
            break;
        }
        seq.push(r.neg());
    }
    let changes = |x: &BigRational| {
        let signs: Vec<i32> = seq
            .iter()
            .map(|s| eval_q(s, x))
            .filter(|v| !v.is_zero())
            .map(|v| if v.is_positive() { 1 } else { -1 })
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    changes(lo) - changes(hi)
}

/// Exact and numeric checks that every reciprocal root has modulus `p`.
///
/// Exact: `Q(u) = p^m·L(u/p)` is (anti)self-reciprocal; after removing
/// `u² − 1` when `ε = −1` it becomes `u^n·R(u + 1/u)`, and all roots lie on
/// the unit circle iff the squarefree part of `R` has all its roots in
/// `[−2, 2]` (Sturm). Numeric: Aberth iteration on the squarefree part of
/// `Q`, relative tolerance `10⁻⁶`.
pub fn check_root_moduli(coeffs: &[BigInt], p: u64, eps: i8) -> Result<()> {
    let m = coeffs.len() - 1;
    let pb = BigInt::from(p);
    let q: QPoly = qpoly(coeffs.iter().enumerate().map(|(l, a)| a * pb.pow((m - l) as u32)));
    let mut sym = q.clone();
    if eps == -1 {
        let u2m1 = qpoly([BigInt::from(-1), BigInt::zero(), BigInt::one()]);
        let (quo, rem) = sym.divrem(&u2m1).expect("monic");
        if !rem.is_empty() {
            return Err(Error::RootModulusFailure("ε = −1 but ±1 are not roots".into()));
        }
        sym = quo;
    }
    let sdeg = sym.degree().unwrap_or(0);
    if !sdeg.is_multiple_of(2) {
        return Err(Error::RootModulusFailure("odd reciprocal part".into()));
    }
    let n = sdeg / 2;
    // R(x) = c_n + Σ_k c_{n+k}·V_k(x), V_k(u + 1/u) = u^k + u^{−k}
    let c = |i: usize| sym.coeff(i).cloned().unwrap_or_else(BigRational::zero);
    let two = BigRational::from_integer(BigInt::from(2));
    let x = Poly::new(vec![BigRational::zero(), BigRational::one()]);
    let mut v_prev = Poly::new(vec![two.clone()]);
    let mut v_cur = x.clone();
    let mut r = Poly::new(vec![c(n)]);
    for k in 1..=n {
        r = r.add(&v_cur.scale(&c(n + k)));
        let v_next = x.mul(&v_cur).sub(&v_prev);
        v_prev = std::mem::replace(&mut v_cur, v_next);
    }
    if n > 0 {
        let rs = squarefree(&r);
        let deg = rs.degree().unwrap_or(0);
        let lo = -two.clone();
        let inside = sturm_count(&rs, &lo, &two) + usize::from(eval_q(&rs, &lo).is_zero());
        if inside != deg {
            return Err(Error::RootModulusFailure(format!("{} of {deg} roots of R off [−2, 2]", deg - inside)));
        }
    }
    let dev = numeric_root_deviation(&squarefree(&q));
    if dev > 1e-6 {
        return Err(Error::RootModulusFailure(format!("numeric |u| deviates by {dev:e}")));
    }
    Ok(())
}

/// `max | |u| − 1 |` over the roots of `a`, found by Aberth iteration.
pub fn numeric_root_deviation(a: &QPoly) -> f64 {
    let roots = aberth_roots(a);
    roots.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
}

/// All complex roots of a squarefree rational polynomial.
pub fn aberth_roots(a: &QPoly) -> Vec<Complex64> {
    let deg = match a.degree() {
        Some(d) if d > 0 => d,
        _ => return Vec::new(),
    };
    let lead = a.lead().unwrap().clone();
    let cs: Vec<f64> = a.coeffs().iter().map(|c| (c / &lead).to_f64().unwrap_or(0.0)).collect();
    let horner = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for c in cs.iter().rev() {
            dv = dv * z + v;
            v = v * z + Complex64::new(*c, 0.0);
        }
        (v, dv)
    };
    let radius = cs[..deg].iter().map(|c| c.abs()).fold(0.0, f64::max).powf(1.0 / deg as f64).clamp(0.5, 2.0);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (v, dv) = horner(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let s: Complex64 = (0..deg).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    // Newton polish
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = horner(*zi);
            if dv.norm() > 0.0 {
                *zi -= v / dv;
            }
        }
    }
    z
}
