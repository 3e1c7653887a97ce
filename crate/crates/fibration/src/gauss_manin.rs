//! The Gauss–Manin connection of `z² = x³ + a(y)x + b(y)`.
//!
//! On the relative basis `e_0 = dx/z`, `e_1 = x dx/z` the connection acts on
//! column coordinate vectors as `d/dy + B(y)`, so `∇e_j = Σ_i B_ij e_i`, with
//! `B = β/Δ` and
//!
//! ```text
//! β = [ −a²a′ − (9/2)bb′      −a²b′ + (3/2)ab a′ ]
//!     [ −3ab′ + (9/2)ba′       a²a′ + (9/2)bb′   ]
//! ```
//!
//! `β` is stored doubled (`2β`) so every coefficient is an integer.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::family::WeierstrassFamily;
use crate::padic::Poly;

pub type ZPoly = Poly<BigInt>;
pub type QPoly = Poly<BigRational>;

/// `2β` and `Δ` over `Z` (from the integer lifts of `a` and `b`).
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionData {
    /// Row-major entries of `2β`.
    pub beta2: [ZPoly; 4],
    pub delta: ZPoly,
    pub p: u64,
}

fn z(n: i64) -> BigInt {
    BigInt::from(n)
}

fn zpoly(cs: &[i64]) -> ZPoly {
    Poly::new(cs.iter().map(|&c| z(c)).collect())
}

/// Exact `2β` from integer polynomials `a`, `b`.
pub fn beta2_of(a: &ZPoly, b: &ZPoly) -> [ZPoly; 4] {
    let (da, db) = (a.derivative(), b.derivative());
    let a2 = a.mul(a);
    let b11 = a2.mul(&da).scale(&z(-2)).sub(&b.mul(&db).scale(&z(9)));
    let b12 = a2.mul(&db).scale(&z(-2)).add(&a.mul(b).mul(&da).scale(&z(3)));
    let b21 = a.mul(&db).scale(&z(-6)).add(&b.mul(&da).scale(&z(9)));
    let b22 = b11.neg();
    [b11, b12, b21, b22]
}

/// Builds `(2β, Δ)` for a family.
pub fn connection_matrix(f: &WeierstrassFamily) -> ConnectionData {
    let a = zpoly(&f.lifted_a());
    let b = zpoly(&f.lifted_b());
    ConnectionData { beta2: beta2_of(&a, &b), delta: f.lifted_delta(), p: f.p() }
}

pub fn to_q(a: &ZPoly) -> QPoly {
    a.map(|c| BigRational::from_integer(c.clone()))
}

fn q_rem(a: &QPoly, m: &QPoly) -> QPoly {
    a.divrem(m).expect("nonzero modulus").1
}

impl ConnectionData {
    pub fn trace2(&self) -> ZPoly {
        self.beta2[0].add(&self.beta2[3])
    }

    /// `det(2β) = 4·det β`.
    pub fn det2(&self) -> ZPoly {
        self.beta2[0].mul(&self.beta2[3]).sub(&self.beta2[1].mul(&self.beta2[2]))
    }

    /// Largest degree among the entries of `β`.
    pub fn beta_degree(&self) -> Option<usize> {
        self.beta2.iter().filter_map(|e| e.degree()).max()
    }
}

/// True iff `Tr β = 0` and `Δ | det β` in `Q[y]`.
///
/// For squarefree `Δ` this is equivalent to nilpotency of every finite
/// residue `β(γ)/Δ′(γ)`: a 2×2 matrix is nilpotent iff trace and
/// determinant vanish, and `det β(γ) = 0` at every root `γ` of `Δ`.
pub fn residue_nilpotency_check(c: &ConnectionData) -> bool {
    if !c.trace2().is_empty() || c.delta.is_empty() {
        return false;
    }
    q_rem(&to_q(&c.det2()), &to_q(&c.delta)).is_empty()
}

/// The leading term `R = lim_{y→∞} y·B(y)` of the connection at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct InfinityResidue {
    /// Row-major entries of `R`.
    pub r: [BigRational; 4],
    /// Diagonal entries (the eigenvalues, `R` being upper triangular).
    pub eigenvalues: (BigRational, BigRational),
}

/// Computes `R = β_{2d−1}/Δ_{2d}`: upper triangular with diagonal
/// `(−d/6, d/6)` and corner `(1/27)·(−lc(a)²·d/(4 lc(b)))` when
/// `deg a = d/2` (zero otherwise).
pub fn residue_at_infinity(f: &WeierstrassFamily) -> Result<InfinityResidue> {
    let d = f.d();
    let deg_a = f.a().degree().unwrap_or(0);
    if deg_a > d / 2 {
        return Err(Error::DegreeConditionViolated(format!("deg a = {deg_a} > d/2 = {}", d / 2)));
    }
    let c = connection_matrix(f);
    if c.delta.degree() != Some(2 * d) {
        return Err(Error::DegreeConditionViolated(format!(
            "deg delta = {:?}, expected {}",
            c.delta.degree(),
            2 * d
        )));
    }
    if c.beta_degree().is_some_and(|k| k >= 2 * d) {
        return Err(Error::DegreeConditionViolated("deg beta >= deg delta".into()));
    }
    let lead = BigRational::from_integer(c.delta.coeff(2 * d).cloned().unwrap() * 2);
    let r: [BigRational; 4] = std::array::from_fn(|k| {
        let top = c.beta2[k].coeff(2 * d - 1).cloned().unwrap_or_default();
        BigRational::from_integer(top) / &lead
    });
    if !r[2].is_zero() {
        return Err(Error::DegreeConditionViolated("residue at infinity not upper triangular".into()));
    }
    let eigenvalues = (r[0].clone(), r[3].clone());
    Ok(InfinityResidue { r, eigenvalues })
}

/// Relative reduction over `Q` at a fixed fibre: the class of `A(x)·dx/(2z)`
/// on `z² = x³ + a0·x + b0` as `(c0, c1)` in the basis `(dx/z, x dx/z)`.
///
/// Uses `d(x^j z) ≡ 0`, i.e. `x^{j+2} ≡ −[(2j+1)a0·x^j + 2j·b0·x^{j−1}]/(2j+3)`
/// on `dx/z`.
pub fn reduce_x_degree_q(mut num: Vec<BigRational>, a0: &BigRational, b0: &BigRational) -> (BigRational, BigRational) {
    let two = BigRational::from_integer(z(2));
    while num.len() > 2 {
        let top = num.len() - 1;
        let c = num.pop().unwrap();
        if c.is_zero() {
            continue;
        }
        let j = (top - 2) as i64;
        let den = BigRational::from_integer(z(2 * j + 3));
        num[top - 2] -= &c * a0 * BigRational::from_integer(z(2 * j + 1)) / &den;
        if j >= 1 {
            num[top - 3] -= &c * b0 * BigRational::from_integer(z(2 * j)) / &den;
        }
    }
    num.resize(2, BigRational::zero());
    (&num[0] / &two, &num[1] / &two)
}

/// Class of `P(x)·dx/z³` as a polynomial multiple of `dx/z`, over `Q`.
///
/// Solves `U·Q + V·Q′ = P`; then `P dx/z³ ≡ (U + 2V′) dx/z`.
pub fn reduce_pole_q(p_num: &QPoly, q: &QPoly) -> QPoly {
    let dq = q.derivative();
    let (_, t) = bezout_q(q, &dq);
    // V = t·P mod Q, then U = (P − V·Q′)/Q is exact
    let v = q_rem(&t.mul(p_num), q);
    let u = p_num.sub(&v.mul(&dq)).divrem(q).expect("nonzero").0;
    u.add(&v.derivative().scale(&BigRational::from_integer(z(2))))
}

/// `(s, t)` with `s·f + t·g = 1` over `Q` (coprime inputs).
pub fn bezout_q(f: &QPoly, g: &QPoly) -> (QPoly, QPoly) {
    let one = BigRational::one();
    let (mut r0, mut r1) = (f.clone(), g.clone());
    let (mut s0, mut s1) = (Poly::new(vec![one.clone()]), Poly::zero());
    let (mut t0, mut t1) = (Poly::zero(), Poly::new(vec![one]));
    while !r1.is_empty() {
        let (qt, r) = r0.divrem(&r1).expect("nonzero");
        r0 = std::mem::replace(&mut r1, r);
        let s2 = s0.sub(&qt.mul(&s1));
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = t0.sub(&qt.mul(&t1));
        t0 = std::mem::replace(&mut t1, t2);
    }
    let c = r0.coeff(0).cloned().expect("coprime").recip();
    (s0.scale(&c), t0.scale(&c))
}

/// `B(y0) = β(y0)/Δ(y0)` over `Q`.
pub fn connection_at(c: &ConnectionData, y0: &BigRational) -> [BigRational; 4] {
    let ev = |p: &ZPoly| to_q(p).eval(y0).unwrap_or_else(BigRational::zero);
    let dv = ev(&c.delta) * BigRational::from_integer(z(2));
    std::array::from_fn(|k| ev(&c.beta2[k]) / &dv)
}

/// Column `i` of `B(y0)` computed by differentiating `x^i dx/z` along `y`:
/// `∂_y(x^i dx/z) = −(1/2) x^i Q_y dx/z³`, reduced to the basis.
pub fn derivative_column(f: &WeierstrassFamily, y0: &BigRational, i: usize) -> (BigRational, BigRational) {
    let a = to_q(&zpoly(&f.lifted_a()));
    let b = to_q(&zpoly(&f.lifted_b()));
    let zero = BigRational::zero();
    let ev = |p: &QPoly, y: &BigRational| p.eval(y).unwrap_or_else(|| zero.clone());
    let (a0, b0) = (ev(&a, y0), ev(&b, y0));
    let (a1, b1) = (ev(&a.derivative(), y0), ev(&b.derivative(), y0));
    let q = Poly::new(vec![b0.clone(), a0.clone(), zero.clone(), BigRational::one()]);
    // x^i · (a1 x + b1)
    let mut num = vec![zero.clone(); i + 2];
    num[i] = b1;
    num[i + 1] = a1;
    let red = reduce_pole_q(&Poly::new(num), &q);
    // −(1/2)·red·dx/z = −red·dx/(2z)
    let coeffs: Vec<BigRational> = red.coeffs().iter().map(|c| -c).collect();
    reduce_x_degree_q(coeffs, &a0, &b0)
}

/// Largest absolute coefficient of `2β` (diagnostics for `gm-info`).
pub fn beta_height(c: &ConnectionData) -> BigInt {
    c.beta2.iter().flat_map(|e| e.coeffs().iter().map(|x| x.abs())).max().unwrap_or_default()
}

/// Formats an integer polynomial for diagnostics.
pub fn format_zpoly(p: &ZPoly) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut terms = Vec::new();
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        terms.push(match i {
            0 => format!("{c}"),
            1 => format!("{c}*y"),
            _ => format!("{c}*y^{i}"),
        });
    }
    terms.join(" + ").replace("+ -", "- ")
}
