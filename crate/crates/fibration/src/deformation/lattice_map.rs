//! The Frobenius matrix `Ã` on the lattice basis `S(k)`.
//!
//! For a basis form `x^i y^j dx∧dy/(2z)` with relative class `G_s(y)·dy`,
//! Frobenius acts by `p·y^{p−1}·F(y)·G_s(y^p) dy`. Writing `F = G/Δ^M`,
//! the image is reduced to canonical coordinates and expressed in the
//! basis images modulo the exact relations.

use num_bigint::BigInt;

use super::cokernel::{left_inverse, CokernelContext, CokernelForm, PVec};
use super::horizontal::PPoly;
use super::relative::{ord_factorial, rebase, relative_frobenius, relative_reduce_monomial, RelFrobenius, RelFrobeniusPlan};
use crate::error::{Error, Result};
use crate::family::{floor_log, weighted_params, WeierstrassFamily};
use crate::lattice::{lattice_basis, LatticeBasis};
use crate::padic::{Matrix, PadicScalar, Poly, EXACT_PREC};

/// `Ã` together with the diagnostics of how it was obtained.
#[derive(Clone, Debug)]
pub struct FrobeniusOnLattice {
    /// Column `s` is the image of basis element `s`.
    pub a_tilde: Matrix<PadicScalar>,
    /// Minimum absolute precision over the entries of `Ã`.
    pub n_delivered: i64,
    /// `−ord` of the worst entry of the inverse basis change.
    pub basis_change_valuation: i64,
    /// Worst valuation of the pole and polynomial reduction tables.
    pub table_valuation: i64,
    pub m: usize,
    pub pole_at_infinity: i64,
    pub tail_valuation: i64,
    /// Minimum valuation of the component outside `span(basis) + exact`;
    /// it should not be below `n_delivered`.
    pub residual: i64,
    /// Precision requested from the relative Frobenius on the final pass.
    pub relative_target: i64,
    pub basis: LatticeBasis,
}

/// Exact-data context: reduction tables and the inverse basis change.
pub struct LatticeContext {
    pub ctx: CokernelContext,
    pub basis: LatticeBasis,
    /// Relative classes `(c0, c1)` of the basis forms over the table ring.
    pub classes: Vec<PVec>,
    l: Matrix<PadicScalar>,
    k: Matrix<PadicScalar>,
    pub basis_change_valuation: i64,
}

impl LatticeContext {
    pub fn new(f: &WeierstrassFamily, m_max: usize, n_ctx: i64) -> Result<Self> {
        let w = weighted_params(f);
        let basis = lattice_basis(f, w.k_lattice)?;
        let mut ctx = CokernelContext::new(f, m_max, n_ctx)?;
        let ring = ctx.ring.clone();
        let conv = |q: &crate::gauss_manin::QPoly| -> PPoly {
            Poly::new(q.coeffs().iter().map(|c| ring.from_rational(c, n_ctx)).collect())
        };
        let classes: Vec<PVec> = basis
            .monomials
            .iter()
            .map(|m| {
                let rc = relative_reduce_monomial(f, m.i, m.j);
                [conv(&rc.c0), conv(&rc.c1)]
            })
            .collect();
        let zero_numer: PVec = [Poly::zero(), Poly::zero()];
        let mut cols: Vec<CokernelForm> = classes.iter().map(|c| ctx.reduce(&zero_numer, 1, c)).collect();
        cols.extend(ctx.relations());
        let a = Matrix::from_fn(ctx.dim(), cols.len(), |r, c| cols[c].vector[r].clone());
        let li = left_inverse(&a, n_ctx)?;
        let nb = basis.monomials.len();
        let l = Matrix::from_fn(nb, ctx.dim(), |r, c| li.l.get(r, c).clone());
        let basis_change_valuation = super::cokernel::valuation_loss(&l);
        Ok(LatticeContext { ctx, basis, classes, l, k: li.k, basis_change_valuation })
    }

    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    /// Coordinates in the basis of a canonical class, and the valuation of
    /// its component outside `span(basis) + exact`.
    pub fn coordinates(&self, form: &CokernelForm) -> (Vec<PadicScalar>, i64) {
        let coords = self.l.mul_vec(&form.vector);
        let res = self.k.mul_vec(&form.vector);
        let rv = res.iter().map(|x| if x.is_zero() { x.precision() } else { x.valuation() }).min().unwrap_or(EXACT_PREC);
        (coords, rv)
    }

    /// Applies Frobenius to basis element `s` given `F = G/Δ^M`.
    pub fn frobenius_column(&mut self, rel: &RelFrobenius, s: usize) -> (Vec<PadicScalar>, i64) {
        let ring = self.ctx.ring.clone();
        let p = self.ctx.p as usize;
        let g: Vec<PPoly> = rel.g.iter().map(|e| e.map(|x| rebase(&ring, x))).collect();
        let cap = rel.precision + 2;
        let gs: Vec<PPoly> = self.classes[s].iter().map(|c| c.map(|x| x.with_cap(cap)).inflate(p)).collect();
        let shift = Poly::monomial(ring.from_i64(p as i64, cap), p - 1);
        let numer: PVec = std::array::from_fn(|r| g[2 * r].mul(&gs[0]).add(&g[2 * r + 1].mul(&gs[1])).mul(&shift));
        let form = self.ctx.reduce(&numer, rel.m, &[Poly::zero(), Poly::zero()]);
        self.coordinates(&form)
    }

    /// `Ã` from one relative Frobenius.
    pub fn matrix(&mut self, rel: &RelFrobenius) -> (Matrix<PadicScalar>, i64) {
        let n = self.dim();
        let mut cols = Vec::with_capacity(n);
        let mut residual = EXACT_PREC;
        for s in 0..n {
            let (c, r) = self.frobenius_column(rel, s);
            residual = residual.min(r);
            cols.push(c);
        }
        (Matrix::from_fn(n, n, |r, c| cols[c][r].clone()), residual)
    }
}

/// Working precision for the exact-data tables at pole order `m`: the
/// step denominators `(m−1)²` cancel in the products only if carried.
pub fn context_precision(p: u64, m: usize, target: i64) -> i64 {
    target + 2 * ord_factorial(p, m as u64) + 4 * (floor_log(p, m as u64 + 1) as i64 + 1) + 10
}

/// Computes `Ã` to absolute precision at least `n_target`, raising the
/// relative-Frobenius precision until the delivered precision suffices.
pub fn frobenius_on_lattice(f: &WeierstrassFamily, n_target: i64) -> Result<FrobeniusOnLattice> {
    let p = f.p();
    let mut t_g = n_target + 2;
    let mut ctx: Option<(LatticeContext, i64)> = None;
    for _ in 0..6 {
        let plan = RelFrobeniusPlan::for_target(p, t_g);
        let n_ctx = context_precision(p, plan.m_max, t_g);
        let rel = relative_frobenius(f, plan)?;
        if ctx.as_ref().is_none_or(|(_, n)| *n < n_ctx) {
            ctx = Some((LatticeContext::new(f, rel.m, n_ctx)?, n_ctx));
        }
        let lc = &mut ctx.as_mut().unwrap().0;
        let (a, residual) = lc.matrix(&rel);
        let n_delivered = a.data().iter().map(|x| x.precision()).min().unwrap_or(EXACT_PREC);
        if n_delivered >= n_target {
            return Ok(FrobeniusOnLattice {
                a_tilde: a.map(|x| x.with_cap(n_delivered)),
                n_delivered,
                basis_change_valuation: lc.basis_change_valuation,
                table_valuation: lc.ctx.table_valuation(),
                m: rel.m,
                pole_at_infinity: rel.pole_at_infinity,
                tail_valuation: rel.tail_valuation,
                residual,
                relative_target: t_g,
                basis: lc.basis.clone(),
            });
        }
        t_g += n_target - n_delivered;
    }
    Err(Error::InsufficientPrecision(format!("Ã not delivered to precision {n_target}")))
}

/// Integer lift of `Ã` (symmetric residues modulo `p^{n_delivered}`).
pub fn lift_matrix(a: &Matrix<PadicScalar>) -> Vec<Vec<BigInt>> {
    (0..a.rows()).map(|r| (0..a.cols()).map(|c| a.get(r, c).lift_symmetric()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::random_family;
    use crate::padic::charpoly;

    #[test]
    fn trace_matches_point_count_mod_p() {
        for (p, seed) in [(7u64, 1u64), (5, 2)] {
            let f = random_family(p, 6, seed).unwrap();
            let fl = frobenius_on_lattice(&f, 3).unwrap();
            eprintln!(
                "p={p} M={} N={} bcv={} tv={} res={} tg={}",
                fl.m, fl.n_delivered, fl.basis_change_valuation, fl.table_valuation, fl.residual, fl.relative_target
            );
            assert!(fl.residual >= fl.n_delivered - fl.basis_change_valuation);
            let cp = charpoly(&fl.a_tilde);
            // every eigenvalue of Ã is divisible by p
            for (k, c) in cp.coeffs().iter().rev().enumerate().skip(1) {
                assert!(c.is_zero() || c.valuation() >= k as i64, "k={k} v={}", c.valuation());
            }
        }
    }
}
