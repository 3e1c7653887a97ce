//! Fixed-precision p-adic arithmetic with tracked absolute precision.

use fibration::padic::PadicRing;

fn main() -> fibration::Result<()> {
    let ring = PadicRing::new(7, 20);
    let x = ring.from_i64(3, 10);
    let y = ring.from_i64(49 * 5, 8);
    let q = x.div(&y)?;
    println!("3 / (7²·5) = {q}: valuation {}, precision {}", q.valuation(), q.precision());
    let back = q.mul(&y);
    println!("times 7²·5 = {back}, congruent to 3: {}", back.congruent(&x));
    let s = x.add(&y.shift(-2));
    println!("3 + 5 = {s} (precision {})", s.precision());
    let t = ring.from_i64(2, 10).pow(48);
    println!("2^48 ≡ {} mod 7^10 (Fermat: 2^6 ≡ 1 mod 7, so ord(2^48 − 1) ≥ 1: {})", t.lift_symmetric(), t.sub(&ring.one(10)).valuation() >= 1);
    Ok(())
}
