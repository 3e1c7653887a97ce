//! Engine against the point-counting oracle on a few families over F_5.

use fibration::family::random_family;
use fibration::oracle::{euler_series, oracle_lfunction, place_cutoff};
use fibration::pipeline::{compute_lfunction, RunOptions};

fn main() -> fibration::Result<()> {
    for seed in 0..3 {
        let f = random_family(5, 6, seed)?;
        let series = euler_series(&f, place_cutoff(6))?;
        let oracle = oracle_lfunction(&f)?;
        let engine = compute_lfunction(&f, &RunOptions::default())?;
        println!("seed {seed}: Euler product to T^{} = {:?}", series.len() - 1, series);
        println!("  oracle {:?}", oracle.coeffs);
        println!("  engine {:?} -> {}", engine.l.coeffs, if engine.l == oracle { "MATCH" } else { "MISMATCH" });
    }
    Ok(())
}
