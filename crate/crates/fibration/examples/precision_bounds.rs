//! Coefficient precision bounds, and a perturbation experiment that
//! measures how much of `p^{N+1}` noise survives in `det(1 − p^{-1}AT)`.

use fibration::family::SplitMix64;
use fibration::precision::{guaranteed_precision, m_of_ell, perturbation_trial, plan_required_precision, HodgeShape};

fn main() {
    for (d, p) in [(6usize, 7u64), (6, 5), (12, 5)] {
        let k = 2 * d - 4;
        let shape = HodgeShape::for_degree(d);
        let n = plan_required_precision(d, p, k);
        println!("d = {d}, p = {p}: planned N = {n}, shape {shape:?}");
        for ell in 1..=d - 1 {
            let b = guaranteed_precision(n, ell, &shape, p, k).unwrap();
            println!("  ℓ = {ell}: m(ℓ) = {}, uniform {}, per-ℓ {}, sound {}", m_of_ell(ell, &shape, n).unwrap(), b.uniform, b.per_ell, b.sound);
        }
    }
    let shape = HodgeShape::new(2, 5, 1);
    let mut rng = SplitMix64::new(1);
    for n in [2, 3, 5] {
        let obs = perturbation_trial(&shape, n, 5, &mut rng);
        let shown: Vec<String> = obs.iter().map(|&v| if v == i64::MAX { "∞".into() } else { v.to_string() }).collect();
        println!("shape {shape:?}, N = {n}: observed precision per coefficient [{}]", shown.join(", "));
    }
}
