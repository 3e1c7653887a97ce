use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use fibration::family::random_family;
use fibration::fiber::FiberCurve;
use fibration::lfunction::{recover_weil_polynomial_signed, ApproxCoeff, WeilPolynomial};
use fibration::oracle::oracle_lfunction;

fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `∏(1 − t_i T + p²T²)`, times `1 − p²T²` when `odd` (degree 8 either way).
fn weil_product(p: u64, traces: &[i64], odd: bool) -> Vec<BigInt> {
    let p2 = BigInt::from(p * p);
    let mut l = vec![BigInt::from(1)];
    let used = if odd { &traces[..3] } else { traces };
    for &t in used {
        l = mul(&l, &[BigInt::from(1), BigInt::from(-t), p2.clone()]);
    }
    if odd {
        l = mul(&l, &[BigInt::from(1), BigInt::from(0), -p2]);
    }
    l
}

fn brute_affine_count(p: u64, a0: u64, b0: u64) -> u64 {
    let mut n = 0;
    for x in 0..p {
        let rhs = (x * x % p * x + a0 * x + b0) % p;
        n += (0..p).filter(|z| z * z % p == rhs).count() as u64;
    }
    n
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Exact low halves of products of weight-2 factors recover the product.
    #[test]
    fn weil_recovery_round_trip(p in prop::sample::select(vec![5u64, 7, 11]), odd in any::<bool>(), raw in prop::collection::vec(0i64..1000, 4)) {
        let span = 4 * p as i64 + 1;
        // bias towards the trace 2p, i.e. the double root p
        let traces: Vec<i64> = raw.iter().map(|&r| if r < 100 { 2 * p as i64 } else { r % span - 2 * p as i64 }).collect();
        let l = weil_product(p, &traces, odd);
        let want = WeilPolynomial::from_coeffs(l.clone(), p).unwrap();
        let low: Vec<ApproxCoeff> = l.iter().take(6).map(|c| ApproxCoeff { value: BigRational::from_integer(c.clone()), precision: 40 }).collect();
        let top = BigRational::from_integer(BigInt::from(want.epsilon));
        let sign = ApproxCoeff { value: top, precision: 5 };
        let got = recover_weil_polynomial_signed(&low, Some(&sign), 6, p).unwrap();
        prop_assert_eq!(&got, &want);
        let roots_at_p = traces.iter().take(if odd { 3 } else { 4 }).filter(|&&t| t == 2 * p as i64).count() * 2 + odd as usize;
        prop_assert_eq!(got.analytic_rank, roots_at_p);
    }

    #[test]
    fn fibre_counts_match_enumeration(p in prop::sample::select(vec![5u64, 7, 11, 13]), a0 in 0u64..13, b0 in 0u64..13) {
        let (a0, b0) = (a0 % p, b0 % p);
        prop_assume!((4 * a0.pow(3) + 27 * b0 * b0) % p != 0);
        let c = FiberCurve::new(p, a0 as i64, b0 as i64).unwrap();
        let n = brute_affine_count(p, a0, b0);
        prop_assert_eq!(c.affine_count(), n);
        prop_assert_eq!(c.trace_of_frobenius(), p as i64 - n as i64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// The sign of the functional equation is the parity of the rank.
    #[test]
    fn oracle_sign_is_rank_parity(seed in 0u64..10_000) {
        let l = oracle_lfunction(&random_family(5, 6, seed).unwrap()).unwrap();
        let parity = if l.analytic_rank.is_multiple_of(2) { 1 } else { -1 };
        prop_assert_eq!(l.epsilon, parity);
        prop_assert_eq!(l.degree(), 8);
    }
}
