//! Frobenius–Hodge precision calculus.
//!
//! Frobenius on a Hodge-adapted basis of `H_log` has a block valuation
//! pattern; `p^{-1}Ã` then has small denominators only in a few columns, and
//! the coefficients of `det(1 − p^{-1}ÃT)` lose far less precision than the
//! naive count suggests. This module computes that loss: `m(ℓ)` in closed
//! form, its exhaustive check over transversals, and the resulting
//! guaranteed and required precisions.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::family::{floor_log, SplitMix64};
use crate::padic::{bigint_val, Matrix};

/// Hodge numbers of the mixed structure `H_prim → H_log → H(D)(−1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HodgeShape {
    pub h20: usize,
    pub h11: usize,
    pub g: usize,
}

impl HodgeShape {
    pub fn new(h20: usize, h11: usize, g: usize) -> Self {
        assert!(h11 >= 1, "h11 counts the hyperplane class");
        HodgeShape { h20, h11, g }
    }

    /// Shape of `H(X, kD)` for the family of degree `d`: `h20 = e − 1`,
    /// `h11 = 10e − 1`, `g = 1`, so that `m = 12e − 2 = 2d − 2` matches the
    /// lattice rank.
    pub fn for_degree(d: usize) -> Self {
        let e = d / 6;
        HodgeShape::new(e - 1, 10 * e - 1, 1)
    }

    pub fn h02(&self) -> usize {
        self.h20
    }

    pub fn h2(&self) -> usize {
        2 * self.h20 + self.h11
    }

    /// Rank of `H_log`: `(h2 − 1) + 2g`.
    pub fn m(&self) -> usize {
        self.h2() - 1 + 2 * self.g
    }

    /// End of the middle range of `m(ℓ)`.
    fn middle_end(&self) -> usize {
        self.h20 + self.h11 - 1 + self.g
    }
}

/// Lower bounds `v_{ij} ≤ ord_p(p^{-1}a_{ij})` on a Hodge-adapted basis,
/// given `ord_p(Ã − A) ≥ N + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationProfile {
    pub v: Vec<Vec<i64>>,
    /// Size of the `H_prim` block (`h2 − 1`).
    pub split: usize,
    pub n: i64,
}

impl ValuationProfile {
    /// Block rows `(1 | 0 | −1 | −1 | −1)` on `H_prim` and `(N | 1 | 0)` on
    /// `H(D)(−1)`.
    pub fn of_shape(shape: &HodgeShape, n: i64) -> Self {
        let split = shape.h2() - 1;
        let m = shape.m();
        let (h20, h11, g) = (shape.h20, shape.h11, shape.g);
        let v = (0..m)
            .map(|r| {
                (0..m)
                    .map(|c| {
                        if r < split {
                            if c < h20 {
                                1
                            } else if c < h20 + h11 - 1 {
                                0
                            } else {
                                -1
                            }
                        } else if c < split {
                            n
                        } else if c < split + g {
                            1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        ValuationProfile { v, split, n }
    }

    pub fn size(&self) -> usize {
        self.v.len()
    }
}

/// The three-case formula read off the valuation matrix "by inspection".
///
/// It is exact when `h20 ≥ 1` and `N ≥ 3`. For `h20 = 0` there is no `−1`
/// to discard as the minimum, and at `N = 2` pairs of off-diagonal entries
/// (`−1` and `N`) are cheaper than the `1`s it counts, so there it
/// overestimates; [`m_of_ell`] is the exact minimum.
pub fn m_of_ell_paper(ell: usize, shape: &HodgeShape) -> Result<i64> {
    check_ell(ell, shape)?;
    let h20 = shape.h20 as i64;
    let l = ell as i64;
    let mid = shape.middle_end() as i64;
    Ok(if l <= h20 {
        -l + 1
    } else if l <= mid {
        -h20 + 1
    } else {
        -h20 + 1 + (l - mid)
    })
}

fn check_ell(ell: usize, shape: &HodgeShape) -> Result<()> {
    if ell == 0 || ell > shape.m() {
        return Err(Error::InvalidParameters(format!("ℓ = {ell} outside 1..={}", shape.m())));
    }
    Ok(())
}

/// Exact minimum of `v(u; τ)` over transversals of size `ℓ` of the profile
/// with parameter `N`.
///
/// Every entry of `V` depends only on its column and on the row block, so a
/// transversal is determined up to cost by how many columns of each type it
/// uses and how many of them are reached across the blocks: `s` top-block
/// columns taken from bottom rows (value `N`) and `s` bottom-block columns
/// taken from top rows (value `−1`). Counting over those types is exact.
pub fn m_of_ell(ell: usize, shape: &HodgeShape, n: i64) -> Result<i64> {
    transversal_count(ell, shape, n, Discard::Min)
}

/// Which term a transversal cost leaves out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discard {
    /// `Σ v − min v`, the cost used in the paper's lemma.
    Min,
    /// `Σ v − max v`: an error of absolute size `p^N` in one factor costs
    /// that factor's own valuation, so the worst case drops the largest.
    Max,
}

/// Exact minimum of `Σ v − max v` over transversals of size `ℓ`: the
/// precision loss of the `ℓ`-th coefficient of `det(1 − p^{-1}ÃT)` when
/// every entry of `p^{-1}Ã` is known modulo `p^N`.
pub fn sound_loss(ell: usize, shape: &HodgeShape, n: i64) -> Result<i64> {
    transversal_count(ell, shape, n, Discard::Max)
}

fn transversal_count(ell: usize, shape: &HodgeShape, n: i64, discard: Discard) -> Result<i64> {
    check_ell(ell, shape)?;
    let (h20, mid0, g) = (shape.h20, shape.h11 - 1, shape.g);
    let mut best = i64::MAX;
    // top columns by value 1 / 0 / −1, bottom columns by value 1 / 0
    for t1 in 0..=h20 {
        for t0 in 0..=mid0 {
            for tm in 0..=h20 {
                for b1 in 0..=g {
                    for b0 in 0..=g {
                        if t1 + t0 + tm + b1 + b0 != ell {
                            continue;
                        }
                        let top = t1 + t0 + tm;
                        let bot = b1 + b0;
                        for s in 0..=top.min(bot) {
                            // replace the dearest columns first
                            let (x1, rest) = (s.min(t1), s.saturating_sub(t1));
                            let (x0, xm) = (rest.min(t0), rest.saturating_sub(t0));
                            let (y1, y0) = (s.min(b1), s.saturating_sub(b1));
                            let mut vals: Vec<(i64, usize)> = vec![
                                (1, t1 - x1),
                                (0, t0 - x0),
                                (-1, tm - xm),
                                (n, s),
                                (-1, s),
                                (1, b1 - y1),
                                (0, b0 - y0),
                            ];
                            vals.retain(|&(_, c)| c > 0);
                            let sum: i64 = vals.iter().map(|&(v, c)| v * c as i64).sum();
                            let it = vals.iter().map(|&(v, _)| v);
                            let drop = if discard == Discard::Min { it.min() } else { it.max() }.unwrap();
                            best = best.min(sum - drop);
                        }
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Exhaustive minimum of `Σ v_{u_i, u_τ(i)} − min_i v_{u_i, u_τ(i)}` over
/// index sets `u` of size `ℓ` and `τ ∈ S_ℓ`.
///
/// Every enumerated transversal is checked to take equally many entries
/// from the two off-diagonal blocks.
pub fn transversal_min_bruteforce(v: &ValuationProfile, ell: usize) -> Result<i64> {
    transversal_bruteforce(v, ell, Discard::Min)
}

/// [`transversal_min_bruteforce`] with a choice of discarded term.
pub fn transversal_bruteforce(v: &ValuationProfile, ell: usize, discard: Discard) -> Result<i64> {
    let census = transversal_census(v, ell, discard)?;
    assert_eq!(census.parity_violations, 0, "a transversal breaks block parity");
    Ok(census.best)
}

/// Outcome of an exhaustive transversal enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransversalCensus {
    pub best: i64,
    pub transversals: u64,
    /// Transversals taking unequally many entries from the two
    /// off-diagonal blocks.
    pub parity_violations: u64,
}

pub fn transversal_census(v: &ValuationProfile, ell: usize, discard: Discard) -> Result<TransversalCensus> {
    let m = v.size();
    if m > 8 {
        return Err(Error::SizeTooLarge);
    }
    if ell == 0 || ell > m {
        return Err(Error::InvalidParameters(format!("ℓ = {ell} outside 1..={m}")));
    }
    let mut census = TransversalCensus { best: i64::MAX, transversals: 0, parity_violations: 0 };
    let mut subset: Vec<usize> = (0..ell).collect();
    loop {
        let mut perm: Vec<usize> = (0..ell).collect();
        loop {
            let mut sum = 0;
            let (mut mn, mut mx) = (i64::MAX, i64::MIN);
            let (mut upper, mut lower) = (0, 0);
            for i in 0..ell {
                let (r, c) = (subset[i], subset[perm[i]]);
                let x = v.v[r][c];
                sum += x;
                mn = mn.min(x);
                mx = mx.max(x);
                if r < v.split && c >= v.split {
                    upper += 1;
                }
                if r >= v.split && c < v.split {
                    lower += 1;
                }
            }
            census.transversals += 1;
            if upper != lower {
                census.parity_violations += 1;
            }
            census.best = census.best.min(sum - if discard == Discard::Min { mn } else { mx });
            if !next_permutation(&mut perm) {
                break;
            }
        }
        if !next_subset(&mut subset, m) {
            break;
        }
    }
    Ok(census)
}

fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| a[i] < a[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| a[j] > a[i]).unwrap();
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

fn next_subset(s: &mut [usize], m: usize) -> bool {
    let k = s.len();
    let Some(i) = (0..k).rev().find(|&i| s[i] < m - k + i) else {
        return false;
    };
    s[i] += 1;
    for j in i + 1..k {
        s[j] = s[j - 1] + 1;
    }
    true
}

/// Precision of `det(1 − p^{-1}ÃT)` when `Ã` is correct modulo `p^{N+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionBound {
    /// The theorem's `N + 1 − h20 − ⌊log_p(k+1)⌋`, stated for every
    /// coefficient.
    pub uniform: i64,
    /// The lemma's refinement `N + m(ℓ) − ⌊log_p(k+1)⌋`.
    pub per_ell: i64,
    /// What the transversal expansion proves for coefficient `ℓ`:
    /// `N′ + sound_loss(ℓ, N′)` with `N′ = N − ⌊log_p(k+1)⌋`, the entry
    /// precision of `p^{-1}Ã` on a Hodge-adapted crystalline basis.
    pub sound: i64,
}

/// The constant coefficient is exactly 1.
pub const EXACT_COEFF: i64 = i64::MAX / 4;

/// Guaranteed absolute precision of the `ℓ`-th coefficient (`ℓ = 0` is
/// exact).
pub fn guaranteed_precision(n: i64, ell: usize, shape: &HodgeShape, p: u64, k: usize) -> Result<PrecisionBound> {
    if n < 2 {
        return Err(Error::InsufficientPrecision(format!("N = {n} < 2")));
    }
    if ell > shape.m() {
        return Err(Error::InvalidParameters(format!("ℓ = {ell} outside 0..={}", shape.m())));
    }
    let c = floor_log(p, k as u64 + 1) as i64;
    let uniform = n + 1 - shape.h20 as i64 - c;
    if ell == 0 {
        return Ok(PrecisionBound { uniform, per_ell: EXACT_COEFF, sound: EXACT_COEFF });
    }
    let per_ell = n + m_of_ell(ell, shape, n)? - c;
    let n1 = n - c;
    let sound = if n1 < 1 { i64::MIN / 4 } else { n1 + sound_loss(ell, shape, n1)? };
    Ok(PrecisionBound { uniform, per_ell, sound })
}

/// `2·binom(2d − 4, ℓ)`: the normalized coefficient of `L(T/p)` lies
/// strictly inside `±` half of this.
pub fn weil_margin(d: usize, ell: usize) -> BigInt {
    BigInt::from(2) * binomial(BigInt::from(2 * d - 4), BigInt::from(ell))
}

/// The coefficients the recovery needs: `ℓ ≤ (2d−4)/2 + 1`.
pub fn recovery_range(d: usize) -> std::ops::RangeInclusive<usize> {
    1..=(2 * d - 4) / 2 + 1
}

/// Smallest `N ≥ 2` whose sound per-coefficient precisions pin every
/// coefficient the recovery needs: `p^{prec(ℓ)} > 2·binom(2d − 4, ℓ)`, with
/// `prec(ℓ)` the least sound bound over `1..=ℓ` (dividing out the trivial
/// factor mixes the lower coefficients in).
pub fn plan_required_precision(d: usize, p: u64, k: usize) -> i64 {
    let shape = HodgeShape::for_degree(d);
    (2..)
        .find(|&n| {
            let mut prec = EXACT_COEFF;
            recovery_range(d).all(|ell| {
                prec = prec.min(guaranteed_precision(n, ell, &shape, p, k).expect("N ≥ 2").sound);
                prec > 0 && BigInt::from(p).pow(prec as u32) > weil_margin(d, ell)
            })
        })
        .unwrap()
}

/// The same planner driven by the theorem's uniform precision.
pub fn plan_uniform_precision(d: usize, p: u64, k: usize) -> i64 {
    let shape = HodgeShape::for_degree(d);
    (2..)
        .find(|&n| {
            let u = guaranteed_precision(n, 1, &shape, p, k).expect("N ≥ 2").uniform;
            u > 0 && recovery_range(d).all(|ell| BigInt::from(p).pow(u as u32) > weil_margin(d, ell))
        })
        .unwrap()
}

/// One perturbation trial: a random integer matrix with the block valuation
/// pattern of `shape`, perturbed by noise of valuation `≥ N + 1`.
///
/// Returns, for each `ℓ`, the observed `ord_p` of the difference of the
/// `ℓ`-th coefficients of `det(1 − p^{-1}·T)` (`i64::MAX` if equal).
pub fn perturbation_trial(shape: &HodgeShape, n: i64, p: u64, rng: &mut SplitMix64) -> Vec<i64> {
    let prof = ValuationProfile::of_shape(shape, n);
    let m = prof.size();
    let pb = BigInt::from(p);
    let rand_int = |rng: &mut SplitMix64, v: i64| -> BigInt {
        let r = BigInt::from(rng.below(2 * p.pow(3)) as i64 - p.pow(3) as i64);
        r * pb.pow(v.max(0) as u32)
    };
    // the true A: ord(a_ij) ≥ v_ij + 1, with the zero block exactly zero
    let a = Matrix::from_fn(m, m, |r, c| {
        if r >= prof.split && c < prof.split {
            BigInt::zero()
        } else {
            rand_int(rng, prof.v[r][c] + 1)
        }
    });
    let noise = Matrix::from_fn(m, m, |_, _| rand_int(rng, n + 1));
    let at = a.add(&noise);
    let ca = a.charpoly();
    let ct = at.charpoly();
    (1..=m)
        .map(|ell| {
            // det(1 − MT)_ℓ is the T^{m−ℓ} coefficient of det(T − M); divide by p^ℓ
            let x = ca.coeff(m - ell).cloned().unwrap_or_default();
            let y = ct.coeff(m - ell).cloned().unwrap_or_default();
            let diff = x - y;
            if diff.is_zero() {
                i64::MAX
            } else {
                bigint_val(&diff.abs(), p) - ell as i64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shapes_up_to(m_max: usize) -> Vec<HodgeShape> {
        let mut out = Vec::new();
        for h20 in 0..=4 {
            for h11 in 1..=m_max {
                for g in 0..=2 {
                    let s = HodgeShape::new(h20, h11, g);
                    if s.m() <= m_max && s.m() >= 1 {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn formula_cases() {
        let s = HodgeShape::new(2, 5, 1);
        for n in [2, 3] {
            assert_eq!(m_of_ell(1, &s, n).unwrap(), 0);
            assert_eq!(m_of_ell(2, &s, n).unwrap(), -1);
        }
        assert_eq!(m_of_ell_paper(2, &s).unwrap(), -1);
        let s = HodgeShape::new(1, 17, 1);
        assert_eq!(s.m(), 20);
        assert_eq!(m_of_ell(10, &s, 3).unwrap(), 0);
        assert_eq!(m_of_ell_paper(20, &s).unwrap(), 2);
        assert_eq!(m_of_ell(20, &s, 3).unwrap(), 2);
        // at N = 2 a cross pair (−1, N) undercuts the formula
        assert_eq!(m_of_ell(20, &s, 2).unwrap(), 1);
        assert!(m_of_ell(0, &s, 2).is_err() && m_of_ell(21, &s, 2).is_err());
    }

    #[test]
    fn family_shapes() {
        for (d, m) in [(6, 10), (12, 22), (30, 58)] {
            let s = HodgeShape::for_degree(d);
            assert_eq!(s.m(), m);
            assert_eq!(s.m(), 2 * d - 2);
        }
    }

    #[test]
    fn bruteforce_matches_formula() {
        for s in shapes_up_to(8) {
            for n in [2, 3] {
                let v = ValuationProfile::of_shape(&s, n);
                for ell in 1..=s.m() {
                    let brute = transversal_min_bruteforce(&v, ell).unwrap();
                    assert_eq!(brute, m_of_ell(ell, &s, n).unwrap(), "{s:?} N={n} ℓ={ell}");
                    let sound = transversal_bruteforce(&v, ell, Discard::Max).unwrap();
                    assert_eq!(sound, sound_loss(ell, &s, n).unwrap(), "{s:?} N={n} ℓ={ell}");
                    if s.h20 >= 1 && n >= 3 {
                        assert_eq!(brute, m_of_ell_paper(ell, &s).unwrap());
                    }
                }
            }
        }
        let one = ValuationProfile { v: vec![vec![0]], split: 1, n: 2 };
        assert_eq!(transversal_min_bruteforce(&one, 1).unwrap(), 0);
        let big = ValuationProfile::of_shape(&HodgeShape::new(1, 7, 1), 2);
        assert_eq!(transversal_min_bruteforce(&big, 2), Err(Error::SizeTooLarge));
    }

    #[test]
    fn guaranteed_examples() {
        let s6 = HodgeShape::for_degree(6);
        assert_eq!(guaranteed_precision(3, 1, &s6, 7, 8).unwrap().uniform, 3);
        let s30 = HodgeShape::for_degree(30);
        assert_eq!(guaranteed_precision(10, 1, &s30, 7, 56).unwrap().uniform, 5);
        assert!(guaranteed_precision(1, 1, &s6, 7, 8).is_err());
        // the trace of p^{-1}Ã is only as good as its entries
        assert_eq!(guaranteed_precision(3, 1, &s6, 7, 8).unwrap().sound, 2);
        // a cross pair (B-block entry, noise in the zero block) costs one more
        assert_eq!(guaranteed_precision(3, 2, &s6, 7, 8).unwrap().sound, 1);
        for ell in 1..=s30.m() {
            let b = guaranteed_precision(10, ell, &s30, 7, 56).unwrap();
            assert!(b.per_ell >= b.uniform);
        }
    }

    #[test]
    fn planner() {
        assert_eq!(plan_uniform_precision(6, 7, 8), 3);
        assert_eq!(plan_uniform_precision(6, 5, 8), 4);
        assert_eq!(plan_uniform_precision(12, 5, 20), 9);
        assert_eq!(plan_required_precision(6, 7, 8), 5);
        assert_eq!(plan_required_precision(6, 5, 8), 6);
        assert_eq!(plan_required_precision(12, 5, 20), 11);
        let mut last = 0;
        for d in [6, 12, 18, 24, 30] {
            let n = plan_required_precision(d, 7, 2 * d - 4);
            assert!(n >= last);
            last = n;
        }
    }

    #[test]
    fn perturbation_respects_sound_bound() {
        let mut rng = SplitMix64::new(11);
        for s in [HodgeShape::new(0, 3, 1), HodgeShape::new(1, 5, 1), HodgeShape::new(2, 3, 1), HodgeShape::new(1, 9, 2)] {
            for n in [2, 3, 5] {
                for _ in 0..5 {
                    let obs = perturbation_trial(&s, n, 5, &mut rng);
                    for (i, o) in obs.iter().enumerate() {
                        let bound = n + sound_loss(i + 1, &s, n).unwrap();
                        assert!(*o >= bound, "{s:?} N={n} ℓ={} ord {o} < {bound}", i + 1);
                    }
                }
            }
        }
    }
}
