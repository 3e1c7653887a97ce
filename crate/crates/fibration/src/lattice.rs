//! The monomial basis `S(k)` of the lattice `H(X, kD)`.
//!
//! A 2-form `(A/2z) dx∧dy` with polynomial `A` is exact on the affine surface
//! when `2A = αQ_x + βQ_y + 2(α_x + β_y)Q`.  Row-reducing these relations over
//! `F_p` inside the space of monomials of bounded weighted degree leaves a
//! set of non-pivot monomials whose 2-forms span the lattice.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::family::{weighted_params, WeierstrassFamily};
use crate::padic::{Fp, Matrix};

/// `x^i y^j` with its weighted degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightedMonomial {
    pub i: usize,
    pub j: usize,
    pub wdeg: usize,
}

/// Sparse bivariate polynomial `Σ c_{ij} x^i y^j` over `Z`.
pub type BiPoly = BTreeMap<(usize, usize), BigInt>;

/// Monomials with `w_x·i + w_y·j ≤ m`, ordered by weighted degree, then `i`.
pub fn monomials_leq(m: i64, w_x: usize, w_y: usize) -> Vec<WeightedMonomial> {
    let mut out = Vec::new();
    if m < 0 {
        return out;
    }
    let m = m as usize;
    for i in 0..=m / w_x {
        for j in 0..=(m - w_x * i) / w_y {
            out.push(WeightedMonomial { i, j, wdeg: w_x * i + w_y * j });
        }
    }
    out.sort_by_key(|t| (t.wdeg, t.i, t.j));
    out
}

/// The lattice basis `S(k)` and the data needed to reduce onto it.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    pub k: usize,
    pub monomials: Vec<WeightedMonomial>,
    pub expected_dim: usize,
    pub coker_exponent: u32,
    p: u64,
    space: Vec<WeightedMonomial>,
    /// Integer lifts of the relation generators.
    relations: Vec<BiPoly>,
    /// Reduced echelon rows keyed by pivot position in `space` (descending order).
    echelon: BTreeMap<usize, Vec<Fp>>,
    /// For each echelon row, its expression in the relations (mod p).
    echelon_combo: BTreeMap<usize, Vec<Fp>>,
}

/// Rank of `H²` of the affine surface: `2d − 2`.
///
/// It splits as the primitive part (degree `2d − 4`, the L-function) plus
/// the Tate twist of `H¹` of the elliptic curve at infinity (rank 2).
pub fn expected_dimension(d: usize) -> usize {
    2 * d - 2
}

/// Weighted-degree bound `k + w_z − (w_x + w_y)` of the 2-form numerators.
pub fn numerator_bound(f: &WeierstrassFamily, k: usize) -> i64 {
    let w = weighted_params(f);
    k as i64 + w.w_z as i64 - (w.w_x + w.w_y) as i64
}

fn q_poly(f: &WeierstrassFamily) -> BiPoly {
    let mut q = BiPoly::new();
    q.insert((3, 0), BigInt::one());
    for (j, c) in f.lifted_a().into_iter().enumerate() {
        if c != 0 {
            *q.entry((1, j)).or_default() += c;
        }
    }
    for (j, c) in f.lifted_b().into_iter().enumerate() {
        if c != 0 {
            *q.entry((0, j)).or_default() += c;
        }
    }
    q
}

fn bi_dx(a: &BiPoly) -> BiPoly {
    a.iter().filter(|(k, _)| k.0 > 0).map(|(&(i, j), c)| ((i - 1, j), c * i)).collect()
}

fn bi_dy(a: &BiPoly) -> BiPoly {
    a.iter().filter(|(k, _)| k.1 > 0).map(|(&(i, j), c)| ((i, j - 1), c * j)).collect()
}

fn bi_mul(a: &BiPoly, b: &BiPoly) -> BiPoly {
    let mut r = BiPoly::new();
    for (&(i, j), c) in a {
        for (&(k, l), d) in b {
            *r.entry((i + k, j + l)).or_default() += c * d;
        }
    }
    r.retain(|_, c| !c.is_zero());
    r
}

fn bi_add(a: &BiPoly, b: &BiPoly) -> BiPoly {
    let mut r = a.clone();
    for (k, c) in b {
        *r.entry(*k).or_default() += c;
    }
    r.retain(|_, c| !c.is_zero());
    r
}

fn mono(i: usize, j: usize) -> BiPoly {
    BiPoly::from([((i, j), BigInt::one())])
}

/// The relation generators: `αQ_x + 2α_x Q` for monomials `α` of degree
/// `≤ (k+1) − (w_y + w_z + 1)` and `βQ_y + 2β_y Q` for monomials `β` of degree
/// `≤ (k+1) − (w_x + w_z + 1)`.
fn relation_generators(f: &WeierstrassFamily, k: usize) -> Vec<BiPoly> {
    let w = weighted_params(f);
    let q = q_poly(f);
    let (qx, qy) = (bi_dx(&q), bi_dy(&q));
    let two = BiPoly::from([((0, 0), BigInt::from(2))]);
    let mut rels = Vec::new();
    for m in monomials_leq(k as i64 + 1 - (w.w_y + w.w_z + 1) as i64, w.w_x, w.w_y) {
        let al = mono(m.i, m.j);
        rels.push(bi_add(&bi_mul(&al, &qx), &bi_mul(&two, &bi_mul(&bi_dx(&al), &q))));
    }
    for m in monomials_leq(k as i64 + 1 - (w.w_x + w.w_z + 1) as i64, w.w_x, w.w_y) {
        let be = mono(m.i, m.j);
        rels.push(bi_add(&bi_mul(&be, &qy), &bi_mul(&two, &bi_mul(&bi_dy(&be), &q))));
    }
    rels
}

fn coords_fp(a: &BiPoly, index: &BTreeMap<(usize, usize), usize>, p: u64) -> Result<Vec<Fp>> {
    let mut v = vec![Fp::new(0, p); index.len()];
    for (key, c) in a {
        let pos = *index.get(key).ok_or(Error::RelationOutOfSpace)?;
        v[pos] = Fp::new(c.mod_floor(&BigInt::from(p)).try_into().expect("small"), p);
    }
    Ok(v)
}

/// Coordinates (rows: monomials of the numerator space in graded order,
/// columns: relation generators) of all relations, reduced mod `p`.
pub fn relation_space(f: &WeierstrassFamily, k: usize) -> Result<Matrix<Fp>> {
    let w = weighted_params(f);
    let space = monomials_leq(numerator_bound(f, k), w.w_x, w.w_y);
    let index = space.iter().enumerate().map(|(n, m)| ((m.i, m.j), n)).collect();
    let rels = relation_generators(f, k);
    let cols = rels.iter().map(|r| coords_fp(r, &index, f.p())).collect::<Result<Vec<_>>>()?;
    let p = f.p();
    Ok(Matrix::from_fn(space.len(), cols.len(), |i, j| cols.get(j).map_or(Fp::new(0, p), |c| c[i])))
}

/// Computes `S(k)` by echelon reduction with pivots chosen from the highest
/// weighted degree downward.
pub fn lattice_basis(f: &WeierstrassFamily, k: usize) -> Result<LatticeBasis> {
    let w = weighted_params(f);
    let p = f.p();
    if k < w.k_lattice {
        return Err(Error::InvalidParameters(format!("k = {k} below the minimum {}", w.k_lattice)));
    }
    let mut space = monomials_leq(numerator_bound(f, k), w.w_x, w.w_y);
    // highest first: position 0 is the largest monomial
    space.reverse();
    let index: BTreeMap<_, _> = space.iter().enumerate().map(|(n, m)| ((m.i, m.j), n)).collect();
    let relations = relation_generators(f, k);
    let nrel = relations.len();
    let mut echelon: BTreeMap<usize, Vec<Fp>> = BTreeMap::new();
    let mut combo: BTreeMap<usize, Vec<Fp>> = BTreeMap::new();
    let zero = Fp::new(0, p);
    for (r, rel) in relations.iter().enumerate() {
        let mut v = coords_fp(rel, &index, p)?;
        let mut c = vec![zero; nrel];
        c[r] = Fp::new(1, p);
        for (&piv, row) in &echelon {
            let fct = v[piv];
            if !fct.is_zero() {
                let crow = &combo[&piv];
                for t in 0..v.len() {
                    v[t] = v[t] - fct * row[t];
                }
                for t in 0..nrel {
                    c[t] = c[t] - fct * crow[t];
                }
            }
        }
        let Some(lead) = v.iter().position(|x| !x.is_zero()) else { continue };
        let inv = v[lead].inv().expect("nonzero");
        v.iter_mut().for_each(|x| *x = *x * inv);
        c.iter_mut().for_each(|x| *x = *x * inv);
        for (piv, row) in echelon.iter_mut() {
            let fct = row[lead];
            if !fct.is_zero() {
                let crow = combo.get_mut(piv).unwrap();
                for t in 0..row.len() {
                    row[t] = row[t] - fct * v[t];
                }
                for t in 0..nrel {
                    crow[t] = crow[t] - fct * c[t];
                }
            }
        }
        echelon.insert(lead, v);
        combo.insert(lead, c);
    }
    let mut monomials: Vec<WeightedMonomial> =
        (0..space.len()).filter(|n| !echelon.contains_key(n)).map(|n| space[n]).collect();
    monomials.sort_by_key(|m| (m.wdeg, m.i, m.j));
    let expected = expected_dimension(f.d());
    if monomials.len() != expected {
        return Err(Error::UnexpectedDimension { found: monomials.len(), expected });
    }
    Ok(LatticeBasis {
        k,
        monomials,
        expected_dim: expected,
        coker_exponent: crate::family::floor_log(p, k as u64 + 1),
        p,
        space,
        relations,
        echelon,
        echelon_combo: combo,
    })
}

impl LatticeBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Monomials of the ambient numerator space.
    pub fn numerator_space(&self) -> &[WeightedMonomial] {
        &self.space
    }

    pub fn relations(&self) -> &[BiPoly] {
        &self.relations
    }

    fn index(&self) -> BTreeMap<(usize, usize), usize> {
        self.space.iter().enumerate().map(|(n, m)| ((m.i, m.j), n)).collect()
    }

    /// Reduction over `F_p`: returns `(c, λ)` with `A ≡ Σ c_s s + Σ λ_r rel_r (mod p)`.
    pub fn reduce_mod_p(&self, a: &BiPoly) -> Result<(Vec<Fp>, Vec<Fp>)> {
        let p = self.p;
        let idx = self.index();
        let mut v = coords_fp(a, &idx, p)?;
        let mut lam = vec![Fp::new(0, p); self.relations.len()];
        for (&piv, row) in &self.echelon {
            let f = v[piv];
            if !f.is_zero() {
                for t in 0..v.len() {
                    v[t] = v[t] - f * row[t];
                }
                for (l, c) in lam.iter_mut().zip(&self.echelon_combo[&piv]) {
                    *l = *l + f * *c;
                }
            }
        }
        let coords = self.monomials.iter().map(|m| v[idx[&(m.i, m.j)]]).collect();
        if v.iter().enumerate().any(|(n, x)| !x.is_zero() && self.echelon.contains_key(&n)) {
            return Err(Error::RelationOutOfSpace);
        }
        Ok((coords, lam))
    }

    /// p-adic reduction by induction: at step `t` reduce the current
    /// remainder mod `p`, subtract the lifted combination (over `Z`), and
    /// divide the now `p`-divisible remainder by `p`.  After `n` steps
    /// `A = Σ c_s s + (exact relation) + p^n·R`; returns `(c mod p^n, p^n·R)`.
    pub fn reduce_padic(&self, a: &BiPoly, n: u32) -> Result<(Vec<BigInt>, BiPoly)> {
        let p = BigInt::from(self.p);
        let mut rem = a.clone();
        let mut coords = vec![BigInt::zero(); self.monomials.len()];
        let mut scale = BigInt::one();
        for _ in 0..n {
            let (c, lam) = self.reduce_mod_p(&rem)?;
            let mut sub = BiPoly::new();
            for (m, ci) in self.monomials.iter().zip(&c) {
                if !ci.is_zero() {
                    *sub.entry((m.i, m.j)).or_default() += BigInt::from(ci.v);
                }
            }
            for (rel, l) in self.relations.iter().zip(&lam) {
                if !l.is_zero() {
                    for (k, v) in rel {
                        *sub.entry(*k).or_default() += v * BigInt::from(l.v);
                    }
                }
            }
            let mut next = BiPoly::new();
            for (k, v) in bi_add(&rem, &sub.into_iter().map(|(k, v)| (k, -v)).collect()) {
                debug_assert!((&v % &p).is_zero());
                next.insert(k, v / &p);
            }
            for (acc, ci) in coords.iter_mut().zip(&c) {
                *acc += &scale * BigInt::from(ci.v);
            }
            scale *= &p;
            rem = next;
        }
        let residual = rem.into_iter().map(|(k, v)| (k, v * &scale)).collect();
        for c in coords.iter_mut() {
            *c = c.mod_floor(&scale);
            if (&*c * 2) > scale {
                *c -= &scale;
            }
        }
        Ok((coords, residual))
    }
}

/// Largest absolute coefficient (for diagnostics).
pub fn bipoly_height(a: &BiPoly) -> BigInt {
    a.values().map(|c| c.abs()).max().unwrap_or_default()
}
