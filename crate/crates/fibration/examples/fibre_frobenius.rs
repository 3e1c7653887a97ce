//! Frobenius on single fibres, and the relative Frobenius specialized to
//! every good fibre of a family.

use fibration::deformation::{relative_frobenius, specialize, RelFrobeniusPlan};
use fibration::family::random_family;
use fibration::fiber::{frobenius_on_fiber, FiberCurve};

fn main() -> fibration::Result<()> {
    let p = 11;
    let c = FiberCurve::new(p, 1, 3)?;
    let fr = frobenius_on_fiber(&c, 4)?;
    println!("y² = x³ + x + 3 over F_{p}: trace {} (count gives {}), det {}", fr.trace(), c.trace_of_frobenius(), fr.det());

    let f = random_family(p, 6, 1)?;
    let rel = relative_frobenius(&f, RelFrobeniusPlan::for_target(p, 2))?;
    println!("F(y) = G(y)/Δ^{} to precision {}, pole order {} at infinity", rel.m, rel.precision, rel.pole_at_infinity);
    for y0 in 0..p {
        let (a0, b0) = f.fiber_at(y0 as i64);
        let Ok(fib) = FiberCurve::new(p, a0.signed(), b0.signed()) else {
            println!("  y0 = {y0}: bad fibre");
            continue;
        };
        let m = specialize(&rel, &f, y0)?;
        let tr = m[0].add(&m[3]);
        println!("  y0 = {y0}: trace F(y0) = {} vs p + 1 − #E = {}", tr.lift_symmetric(), fib.trace_of_frobenius());
    }
    Ok(())
}
