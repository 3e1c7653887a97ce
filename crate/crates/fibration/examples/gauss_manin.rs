//! The Gauss–Manin connection `B = β/Δ` of a family and its residues.

use fibration::family::random_family;
use fibration::gauss_manin::{connection_matrix, format_zpoly, residue_at_infinity, residue_nilpotency_check};

fn main() -> fibration::Result<()> {
    let f = random_family(7, 6, 11)?;
    let c = connection_matrix(&f);
    println!("Δ = {}", format_zpoly(&c.delta));
    for (name, e) in ["2β11", "2β12", "2β21", "2β22"].iter().zip(&c.beta2) {
        println!("{name} = {}", format_zpoly(e));
    }
    println!("Tr β = {}", format_zpoly(&c.trace2()));
    println!("finite residues nilpotent: {}", residue_nilpotency_check(&c));
    let r = residue_at_infinity(&f)?;
    println!("residue at infinity: {:?}, eigenvalues {} and {}", r.r.iter().map(|x| x.to_string()).collect::<Vec<_>>(), r.eigenvalues.0, r.eigenvalues.1);
    Ok(())
}
