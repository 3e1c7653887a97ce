//! The full engine: plan precision, deform Frobenius, reduce to the
//! lattice, recover `L(T)`.

use std::time::{Duration, Instant};

use crate::deformation::frobenius_on_lattice;
use crate::error::{Error, Result};
use crate::family::{validate, weighted_params, WeierstrassFamily};
use crate::lfunction::{normalized_charpoly_k, recover_weil_polynomial_signed, ApproxCoeff, WeilPolynomial};
use crate::precision::plan_required_precision;

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Use this `N` instead of the planner's.
    pub precision_override: Option<i64>,
    /// Use this `k` in the precision bounds instead of `2d − 4`.
    pub k_override: Option<usize>,
    pub check_ambient_smooth: bool,
}

/// An engine run with its precision and pole diagnostics.
#[derive(Clone, Debug)]
pub struct LFunctionRun {
    pub l: WeilPolynomial,
    /// `N` from the planner (or the override).
    pub n_planned: i64,
    /// Precision actually delivered for `Ã`.
    pub n_delivered: i64,
    pub n_effective: i64,
    pub basis_change_valuation: i64,
    pub k: usize,
    /// Pole order `M` of `F(y)` along `Δ`.
    pub pole_order: usize,
    /// Observed pole order of `F(y)` at `y = ∞`.
    pub pole_at_infinity: i64,
    /// The bound `(p + 1)e`.
    pub pole_bound: i64,
    pub l_low: Vec<ApproxCoeff>,
    /// `ε` as read from the top coefficient.
    pub sign_coeff: ApproxCoeff,
    pub elapsed: Duration,
}

impl LFunctionRun {
    pub fn pole_within_bound(&self) -> bool {
        self.pole_at_infinity <= self.pole_bound
    }
}

/// Rejects invalid families with the names of the failed invariants.
pub fn check_family(f: &WeierstrassFamily, ambient: bool) -> Result<()> {
    let report = validate(f, ambient);
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidFamily(report.failures().join(", ")))
    }
}

pub fn compute_lfunction(f: &WeierstrassFamily, opts: &RunOptions) -> Result<LFunctionRun> {
    let start = Instant::now();
    check_family(f, opts.check_ambient_smooth)?;
    let (p, d) = (f.p(), f.d());
    let k = opts.k_override.unwrap_or(weighted_params(f).k_lattice);
    let n_planned = opts.precision_override.unwrap_or_else(|| plan_required_precision(d, p, k));
    if n_planned < 1 {
        return Err(Error::InsufficientPrecision(format!("N = {n_planned}")));
    }
    // Ã is needed modulo p^{N+1}, and the basis change costs its valuation
    let fl = frobenius_on_lattice(f, n_planned + 1)?;
    let fl = if fl.basis_change_valuation > 0 { frobenius_on_lattice(f, n_planned + 1 + fl.basis_change_valuation)? } else { fl };
    let mut fl_cut = fl.clone();
    if opts.precision_override.is_some() {
        // honour the override exactly: forget the surplus digits
        let cap = n_planned + 1 + fl.basis_change_valuation;
        fl_cut.a_tilde = fl.a_tilde.map(|x| x.with_cap(cap));
        fl_cut.n_delivered = fl.n_delivered.min(cap);
    }
    let nc = normalized_charpoly_k(&fl_cut, f, k)?;
    let l = recover_weil_polynomial_signed(&nc.l_low, Some(&nc.sign_coeff), d, p)?;
    Ok(LFunctionRun {
        l,
        n_planned,
        n_delivered: fl_cut.n_delivered,
        n_effective: nc.n_effective,
        basis_change_valuation: fl.basis_change_valuation,
        k,
        pole_order: fl.m,
        pole_at_infinity: fl.pole_at_infinity,
        pole_bound: (p as i64 + 1) * f.e() as i64,
        l_low: nc.l_low,
        sign_coeff: nc.sign_coeff,
        elapsed: start.elapsed(),
    })
}
