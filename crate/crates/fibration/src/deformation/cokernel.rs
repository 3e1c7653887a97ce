//! Canonical representatives in `coker ∇`.
//!
//! Classes are written `Σ_m W_m(y)/Δ^m + P(y)` with vector-valued
//! numerators on `(e_0, e_1) = (dx/z, x dx/z)`. The canonical space keeps
//!
//! * a pole part `w/Δ` with `deg w < 2d` (indices `i·2d + r`), and
//! * a polynomial part of degree `< e` (indices `4d + i·e + t`).
//!
//! Higher poles are lowered with `∇(u/Δ^{m−1})`, where
//! `((1−m)Δ′ + β)·u ≡ w (mod Δ)`; since `Tr β = 0` and `Δ | det β` we have
//! `β² ≡ 0`, so the inverse is `((1−m)Δ′ − β)·Δ′^{−2}/(m−1)²`. High
//! polynomial degrees `t ≥ e` are lowered with `∇(y^{t+1}v)`, whose leading
//! term is `((t+1)I + R)v` with `R` the residue at infinity.
//!
//! Every table here depends only on the family, so it is built once at a
//! high working precision and then applied to inexact data.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::horizontal::{padic_connection, PPoly};
use crate::error::{Error, Result};
use crate::family::WeierstrassFamily;
use crate::gauss_manin::{bezout_q, connection_matrix, residue_at_infinity, to_q, ConnectionData};
use crate::padic::{Matrix, PadicRing, PadicScalar, Poly, EXACT_PREC};

/// A vector-valued polynomial `(f_0, f_1)`.
pub type PVec = [PPoly; 2];

/// A canonical class as a coordinate vector.
#[derive(Clone, Debug)]
pub struct CokernelForm {
    pub vector: Vec<PadicScalar>,
    pub d: usize,
    pub e: usize,
}

impl CokernelForm {
    /// Coefficient of `y^r e_i/Δ`.
    pub fn pole(&self, i: usize, r: usize) -> &PadicScalar {
        &self.vector[i * 2 * self.d + r]
    }

    /// Coefficient of `y^t e_i` (`t < e`).
    pub fn poly(&self, i: usize, t: usize) -> &PadicScalar {
        &self.vector[4 * self.d + i * self.e + t]
    }

    pub fn precision(&self) -> i64 {
        self.vector.iter().map(|x| x.precision()).min().unwrap_or(EXACT_PREC)
    }

    pub fn is_zero(&self) -> bool {
        self.vector.iter().all(|x| x.is_zero())
    }
}

/// Exact-data reduction tables for one family.
pub struct CokernelContext {
    pub ring: Arc<PadicRing>,
    pub p: u64,
    pub d: usize,
    pub e: usize,
    pub n_work: i64,
    pub delta: PPoly,
    pub ddelta: PPoly,
    pub beta: [PPoly; 4],
    /// Residue at infinity, row-major, exact.
    pub rinf: [BigRational; 4],
    /// `T_m`: pole order `m` numerators (4d coordinates) → canonical vector.
    tables: Vec<Matrix<PadicScalar>>,
    s_parts: [Matrix<PadicScalar>; 3],
    poly_table: Vec<[Vec<PadicScalar>; 2]>,
}

fn zero(ring: &Arc<PadicRing>) -> PadicScalar {
    ring.zero(EXACT_PREC)
}

fn pad(p: &PPoly, n: usize, ring: &Arc<PadicRing>) -> Vec<PadicScalar> {
    let mut v: Vec<PadicScalar> = p.coeffs().iter().take(n).cloned().collect();
    v.resize(n, zero(ring));
    v
}

fn vec_add(a: &mut [PadicScalar], b: &[PadicScalar]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x = x.add(y);
    }
}

fn vec_axpy(a: &mut [PadicScalar], c: &PadicScalar, b: &[PadicScalar]) {
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() || y.precision() < EXACT_PREC {
            *x = x.add(&c.mul(y));
        }
    }
}

impl CokernelContext {
    /// Builds the tables for pole orders up to `m_max` at precision `n_work`.
    pub fn new(f: &WeierstrassFamily, m_max: usize, n_work: i64) -> Result<Self> {
        let conn = connection_matrix(f);
        let d = f.d();
        let e = d / 6;
        let ring = PadicRing::new(f.p(), (n_work + 8) as usize);
        let (beta, delta) = padic_connection(&ring, &conn, n_work);
        let ddelta = delta.derivative();
        let rinf = residue_at_infinity(f)?.r;
        let s_parts = pole_step_parts(&ring, &conn, &beta, &delta, &ddelta, d, n_work)?;
        let mut ctx = CokernelContext {
            ring,
            p: f.p(),
            d,
            e,
            n_work,
            delta,
            ddelta,
            beta,
            rinf,
            tables: Vec::new(),
            s_parts,
            poly_table: Vec::new(),
        };
        ctx.extend_tables(m_max);
        Ok(ctx)
    }

    pub fn dim(&self) -> usize {
        4 * self.d + 2 * self.e
    }

    pub fn max_pole(&self) -> usize {
        self.tables.len()
    }

    /// Minimum valuation over all pole tables (the worst loss applying them).
    pub fn table_valuation(&self) -> i64 {
        self.tables
            .iter()
            .flat_map(|t| t.data().iter())
            .chain(self.poly_table.iter().flat_map(|c| c.iter().flat_map(|v| v.iter())))
            .filter(|x| !x.is_zero())
            .map(|x| x.valuation())
            .min()
            .unwrap_or(0)
    }

    /// Minimum precision over the tables.
    pub fn table_precision(&self) -> i64 {
        self.tables
            .iter()
            .flat_map(|t| t.data().iter())
            .chain(self.poly_table.iter().flat_map(|c| c.iter().flat_map(|v| v.iter())))
            .map(|x| x.precision())
            .min()
            .unwrap_or(EXACT_PREC)
    }

    fn extend_tables(&mut self, m_max: usize) {
        let (n2, dim) = (4 * self.d, self.dim());
        if self.tables.is_empty() {
            let one = self.ring.one(self.n_work);
            let z = zero(&self.ring);
            self.tables.push(Matrix::from_fn(dim, n2, |r, c| if r == c { one.clone() } else { z.clone() }));
        }
        while self.tables.len() < m_max {
            let m = self.tables.len() + 1;
            let inv = self.ring.from_ratio(&BigInt::one(), &BigInt::from(m as i64 - 1), self.n_work);
            let inv2 = inv.mul(&inv);
            let [s0, s1, s2] = &self.s_parts;
            let s = s0.add(&s1.scale(&inv)).add(&s2.scale(&inv2));
            let t = self.tables.last().unwrap().mul(&s);
            debug_assert_eq!((t.rows(), t.cols()), (dim, n2));
            self.tables.push(t);
        }
    }

    /// Canonical vector of `y^t e_i` (a polynomial term).
    pub fn poly_image(&mut self, t: usize, i: usize) -> Vec<PadicScalar> {
        while self.poly_table.len() <= t {
            let s = self.poly_table.len();
            let entry = [self.compute_poly_image(s, 0), self.compute_poly_image(s, 1)];
            self.poly_table.push(entry);
        }
        self.poly_table[t][i].clone()
    }

    fn compute_poly_image(&self, t: usize, i: usize) -> Vec<PadicScalar> {
        let (d, e, dim) = (self.d, self.e, self.dim());
        let ring = &self.ring;
        let n = self.n_work;
        let mut out = vec![zero(ring); dim];
        if t < e {
            out[4 * d + i * e + t] = ring.one(n);
            return out;
        }
        // v = ((t+1)I + R)^{-1} e_i over Q
        let tt = BigRational::from_integer(BigInt::from(t as i64 + 1));
        let m = [&tt + &self.rinf[0], self.rinf[1].clone(), self.rinf[2].clone(), &tt + &self.rinf[3]];
        let det = &m[0] * &m[3] - &m[1] * &m[2];
        let inv = [&m[3] / &det, -&m[1] / &det, -&m[2] / &det, &m[0] / &det];
        let v = [ring.from_rational(&inv[i], n), ring.from_rational(&inv[2 + i], n)];
        // y^t e_i − ∇(y^{t+1} v) = y^t e_i − (t+1) y^t v − y^{t+1}βv/Δ
        let ytp1 = |c: &PadicScalar| Poly::monomial(c.clone(), t + 1);
        let bv: [PPoly; 2] = std::array::from_fn(|r| {
            self.beta[2 * r].mul(&ytp1(&v[0])).add(&self.beta[2 * r + 1].mul(&ytp1(&v[1])))
        });
        let mut rest: Vec<Vec<PadicScalar>> = Vec::new();
        for r in 0..2 {
            let (q, rem) = bv[r].divrem(&self.delta).expect("unit leading coefficient");
            // pole part: −rem/Δ
            for (k, c) in pad(&rem, 2 * d, ring).iter().enumerate() {
                out[r * 2 * d + k] = c.neg();
            }
            let mut poly = pad(&q, t + 1, ring);
            poly[t] = poly[t].add(&v[r].mul_int(t as i64 + 1));
            if r == i {
                poly[t] = poly[t].sub(&ring.one(n));
            }
            // remaining polynomial is −poly; its y^t term cancels
            debug_assert!(poly[t].is_zero(), "leading term must cancel");
            rest.push(poly);
        }
        for (r, poly) in rest.iter().enumerate() {
            for (s, c) in poly.iter().enumerate().take(t) {
                if c.is_zero() && c.precision() >= n {
                    continue;
                }
                let img = &self.poly_table[s][r];
                vec_axpy(&mut out, &c.neg(), img);
            }
        }
        out
    }

    /// Canonical vector of `w/Δ^m` with `deg w < 2d`.
    pub fn pole_image(&mut self, w: &PVec, m: usize) -> Vec<PadicScalar> {
        assert!(m >= 1);
        self.extend_tables(m);
        let d2 = 2 * self.d;
        let mut coords = pad(&w[0], d2, &self.ring);
        coords.extend(pad(&w[1], d2, &self.ring));
        self.tables[m - 1].mul_vec(&coords)
    }

    /// Canonical vector of `W/Δ^m + P`.
    pub fn reduce(&mut self, numer: &PVec, m: usize, poly: &PVec) -> CokernelForm {
        let dim = self.dim();
        let mut out = vec![zero(&self.ring); dim];
        let mut cur: PVec = numer.clone();
        let mut polypart: PVec = poly.clone();
        for j in 0..m {
            // cur = w_j + Δ·(rest)
            let mut digit: Vec<PPoly> = Vec::new();
            let mut next: Vec<PPoly> = Vec::new();
            for c in cur.iter() {
                let (q, r) = c.divrem(&self.delta).expect("unit leading coefficient");
                digit.push(r);
                next.push(q);
            }
            let img = self.pole_image(&[digit[0].clone(), digit[1].clone()], m - j);
            vec_add(&mut out, &img);
            cur = [next[0].clone(), next[1].clone()];
        }
        for i in 0..2 {
            polypart[i] = polypart[i].add(&cur[i]);
        }
        for i in 0..2 {
            for (t, c) in polypart[i].coeffs().iter().enumerate() {
                if c.is_zero() && c.precision() >= self.n_work {
                    continue;
                }
                let img = self.poly_image(t, i);
                vec_axpy(&mut out, c, &img);
            }
        }
        CokernelForm { vector: out, d: self.d, e: self.e }
    }

    /// Canonical vector of `∇(y^t v)` for a constant vector `v`.
    pub fn relation(&mut self, t: usize, v: [PadicScalar; 2]) -> CokernelForm {
        let ring = self.ring.clone();
        // ∇(y^t v) = t y^{t−1} v + y^t βv/Δ
        let y = |c: &PadicScalar, k: usize| Poly::monomial(c.clone(), k);
        let numer: PVec =
            std::array::from_fn(|r| self.beta[2 * r].mul(&y(&v[0], t)).add(&self.beta[2 * r + 1].mul(&y(&v[1], t))));
        let poly: PVec = std::array::from_fn(|r| {
            if t == 0 {
                Poly::new(vec![zero(&ring)])
            } else {
                y(&v[r].mul_int(t as i64), t - 1)
            }
        });
        self.reduce(&numer, 1, &poly)
    }

    /// The `2(e+1)` relations `∇(y^t e_i)`, `t ≤ e`, spanning the exact
    /// forms left in the canonical space.
    pub fn relations(&mut self) -> Vec<CokernelForm> {
        let (one, z) = (self.ring.one(self.n_work), zero(&self.ring));
        let mut out = Vec::new();
        for t in 0..=self.e {
            out.push(self.relation(t, [one.clone(), z.clone()]));
            out.push(self.relation(t, [z.clone(), one.clone()]));
        }
        out
    }

    /// `∇(u/Δ^m)` as a numerator over `Δ^{m+1}` (for tests and certificates):
    /// `[Δu′ − mΔ′u + βu]/Δ^{m+1}`.
    pub fn nabla_pole(&self, u: &PVec, m: usize) -> PVec {
        std::array::from_fn(|r| {
            let bu = self.beta[2 * r].mul(&u[0]).add(&self.beta[2 * r + 1].mul(&u[1]));
            self.delta.mul(&u[r].derivative()).sub(&self.ddelta.mul(&u[r]).map(|c| c.mul_int(m as i64))).add(&bu)
        })
    }
}

/// The three matrices with `S_m = S0 + S1/(m−1) + S2/(m−1)²`, the one-step
/// map from numerators at pole order `m` to numerators at order `m−1`.
fn pole_step_parts(
    ring: &Arc<PadicRing>,
    conn: &ConnectionData,
    beta: &[PPoly; 4],
    delta: &PPoly,
    ddelta: &PPoly,
    d: usize,
    n: i64,
) -> Result<[Matrix<PadicScalar>; 3]> {
    let d2 = 2 * d;
    // Δ′^{-1} mod Δ, exactly over Q (the resultant is a p-adic unit)
    let dq = to_q(&conn.delta);
    let (_, t) = bezout_q(&dq, &dq.derivative());
    let dpinv: PPoly = Poly::new(t.coeffs().iter().map(|c| ring.from_rational(c, n)).collect());
    let modd = |x: &PPoly| x.divrem(delta).expect("unit leading coefficient").1;
    let exact_div = |x: &PPoly| x.divrem(delta).expect("unit leading coefficient").0;
    let matvec = |v: &PVec| -> PVec {
        std::array::from_fn(|r| beta[2 * r].mul(&v[0]).add(&beta[2 * r + 1].mul(&v[1])))
    };
    let zp = || Poly::new(vec![ring.zero(EXACT_PREC)]);
    let mut cols: [Vec<Vec<PadicScalar>>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for i in 0..2 {
        for r in 0..d2 {
            let mut w: PVec = [zp(), zp()];
            w[i] = Poly::monomial(ring.one(n), r);
            let u1: PVec = std::array::from_fn(|k| modd(&w[k].mul(&dpinv)).neg());
            let bw = matvec(&w);
            let u2: PVec = std::array::from_fn(|k| modd(&modd(&bw[k].mul(&dpinv)).mul(&dpinv)).neg());
            let bu1 = matvec(&u1);
            let bu2 = matvec(&u2);
            let s0: PVec = std::array::from_fn(|k| exact_div(&w[k].add(&ddelta.mul(&u1[k]))));
            let s1: PVec = std::array::from_fn(|k| exact_div(&ddelta.mul(&u2[k]).sub(&bu1[k])).sub(&u1[k].derivative()));
            let s2: PVec = std::array::from_fn(|k| exact_div(&bu2[k]).neg().sub(&u2[k].derivative()));
            for (slot, s) in [s0, s1, s2].iter().enumerate() {
                let mut col = pad(&s[0], d2, ring);
                col.extend(pad(&s[1], d2, ring));
                if s.iter().any(|c| c.len() > d2 && c.coeffs()[d2..].iter().any(|x| !x.is_zero())) {
                    return Err(Error::ExceptionalResonance(0));
                }
                cols[slot].push(col);
            }
        }
    }
    Ok(cols.map(|cs| Matrix::from_fn(2 * d2, 2 * d2, |r, c| cs[c][r].clone())))
}

/// Result of [`left_inverse`].
pub struct LeftInverse {
    /// `L` with `L·A = I`.
    pub l: Matrix<PadicScalar>,
    /// Rows annihilating the column space: `K·A = 0`.
    pub k: Matrix<PadicScalar>,
}

/// Left inverse of a full-column-rank matrix by elimination with
/// minimal-valuation pivots.
pub fn left_inverse(a: &Matrix<PadicScalar>, prec: i64) -> Result<LeftInverse> {
    let (rows, cols) = (a.rows(), a.cols());
    let ring = a.get(0, 0).ring().clone();
    let one = ring.one(prec);
    let z = ring.zero(EXACT_PREC);
    let mut m: Vec<Vec<PadicScalar>> = (0..rows)
        .map(|r| {
            let mut row: Vec<PadicScalar> = (0..cols).map(|c| a.get(r, c).clone()).collect();
            row.extend((0..rows).map(|c| if c == r { one.clone() } else { z.clone() }));
            row
        })
        .collect();
    for c in 0..cols {
        let piv = (c..rows)
            .filter(|&r| !m[r][c].is_zero())
            .min_by_key(|&r| m[r][c].valuation())
            .ok_or(Error::SingularBasisImages)?;
        m.swap(c, piv);
        let inv = m[c][c].inv()?;
        m[c] = m[c].iter().map(|x| x.mul(&inv)).collect();
        let pivot_row = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == c || row[c].is_zero() && row[c].precision() >= prec {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = x.sub(&f.mul(y));
            }
        }
    }
    let l = Matrix::from_fn(cols, rows, |r, c| m[r][cols + c].clone());
    let k = Matrix::from_fn(rows - cols, rows, |r, c| m[cols + r][cols + c].clone());
    Ok(LeftInverse { l, k })
}

/// `−ord` of the worst entry in a matrix (`0` if all entries are integral).
pub fn valuation_loss(m: &Matrix<PadicScalar>) -> i64 {
    m.data().iter().filter(|x| !x.is_zero()).map(|x| -x.valuation()).max().unwrap_or(0).max(0)
}
