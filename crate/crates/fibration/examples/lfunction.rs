//! L(T) of one random family over F_7 by the deformation engine.
//!
//! `cargo run --release --example lfunction [seed]`

use fibration::family::random_family;
use fibration::pipeline::{compute_lfunction, RunOptions};

fn main() -> fibration::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let f = random_family(7, 6, seed)?;
    println!("a = {:?}\nb = {:?}", f.lifted_a(), f.lifted_b());
    let run = compute_lfunction(&f, &RunOptions::default())?;
    println!("L(T) coefficients: {:?}", run.l.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    println!("epsilon = {}, analytic rank = {}", run.l.epsilon, run.l.analytic_rank);
    println!(
        "N planned {} / delivered {}, pole order {} along Δ, {} at infinity (bound {})",
        run.n_planned, run.n_delivered, run.pole_order, run.pole_at_infinity, run.pole_bound
    );
    println!("{:?}", run.elapsed);
    Ok(())
}
