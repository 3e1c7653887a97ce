//! The monomial basis of the lattice `H(X, kD)` for `d = 6` and `d = 12`.

use fibration::family::{random_family, weighted_params};
use fibration::lattice::lattice_basis;

fn main() -> fibration::Result<()> {
    for d in [6, 12] {
        let f = random_family(5, d, 1)?;
        let w = weighted_params(&f);
        let basis = lattice_basis(&f, w.k_lattice)?;
        println!("d = {d}, k = {}: {} elements (expected {})", basis.k, basis.len(), basis.expected_dim);
        for m in &basis.monomials {
            println!("  x^{} y^{}  weighted degree {}", m.i, m.j, m.wdeg);
        }
    }
    Ok(())
}
