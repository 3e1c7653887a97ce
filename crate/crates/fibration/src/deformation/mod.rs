//! The deformation engine: relative Frobenius by the Gauss–Manin ODE,
//! reduction in `coker ∇`, and the Frobenius matrix on the lattice.

pub mod cokernel;
pub mod horizontal;
pub mod lattice_map;
pub mod relative;

pub use horizontal::{horizontal_solution, Mat2, MatSeries};
pub use relative::{relative_frobenius, relative_reduce, specialize, RelFrobenius, RelFrobeniusPlan, RelativeClass};
pub use cokernel::{left_inverse, CokernelContext, CokernelForm, LeftInverse};
pub use lattice_map::{frobenius_on_lattice, FrobeniusOnLattice, LatticeContext};
