//! Arithmetic substrates: `F_p`, `F_{p^k}`, tracked p-adic scalars,
//! polynomials, truncated series and dense matrices.

mod coeff;
mod ext;
mod field;
mod matrix;
mod poly;
mod scalar;
mod series;

pub use coeff::Coeff;
pub use ext::{ExtElem, ExtField};
pub use field::{is_prime, Fp, PrimeField};
pub use matrix::{charpoly, Matrix};
pub use poly::Poly;
pub use scalar::{bigint_val, int_val, padic_inv, padic_mul, PadicRing, PadicScalar, EXACT_PREC};
pub use series::TruncSeries;

