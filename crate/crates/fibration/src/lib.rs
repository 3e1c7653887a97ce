//! L-functions of elliptic curves `z² = x³ + a(y)x + b(y)` over `F_p(y)`.
//!
//! The curve is viewed as an elliptic surface fibred over the `y`-line.  The
//! library computes the p-adic Frobenius matrix on a lattice in the second
//! cohomology of the affine surface by deforming Frobenius from the fibre at
//! `y = 0`, recovers the L-function from a low-precision approximation using
//! the Hodge structure, and reads off the analytic rank.  An independent
//! point-counting oracle cross-checks every result.
//!
//! The pipeline, module by module:
//!
//! | stage | module |
//! |---|---|
//! | arithmetic | [`padic`] |
//! | input validation, sampling | [`family`] |
//! | monomial basis of the lattice | [`lattice`] |
//! | Gauss–Manin connection | [`gauss_manin`] |
//! | Frobenius of the fibre at `y = 0` | [`fiber`] |
//! | deformation + cokernel reduction | [`deformation`] |
//! | Hodge precision bounds | [`precision`] |
//! | Weil polynomial recovery, rank | [`lfunction`] |
//! | end-to-end engine run | [`pipeline`] |
//! | point-counting oracle | [`oracle`] |
//! | command-line driver | [`cli`] |

pub mod error;
pub mod cli;
pub mod deformation;
pub mod family;
pub mod fiber;
pub mod gauss_manin;
pub mod lfunction;
pub mod oracle;
pub mod lattice;
pub mod padic;
pub mod pipeline;
pub mod precision;

pub use error::{Error, Result};
