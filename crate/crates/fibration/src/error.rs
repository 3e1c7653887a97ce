use thiserror::Error;

/// Every failure the library can report.
///
/// Variants carry enough context for the CLI to name the invariant that broke.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus mismatch: p = {0} vs p = {1}")]
    ModulusMismatch(u64, u64),
    #[error("element is not a unit (p divides it)")]
    NonUnit,
    #[error("{0} is not a prime > 3")]
    BadPrime(u64),
    #[error("modulus is not irreducible of degree {0}")]
    ReducibleModulus(usize),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("no valid family found after {0} attempts")]
    RejectionExhausted(u64),
    #[error("relation has monomials outside the target space (degree bookkeeping bug)")]
    RelationOutOfSpace,
    #[error("lattice basis has {found} elements, expected {expected}")]
    UnexpectedDimension { found: usize, expected: usize },
    #[error("degree condition violated: {0}")]
    DegreeConditionViolated(String),
    #[error("tracked precision underflow in {0}")]
    PrecisionUnderflow(String),
    #[error("relative Frobenius tail did not clear for any M <= {0}")]
    NoStabilization(usize),
    #[error("singular pole-order solve at order {0}")]
    ExceptionalResonance(usize),
    #[error("basis images are dependent in the cokernel of the connection")]
    SingularBasisImages,
    #[error("search space too large for brute force")]
    SizeTooLarge,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("no sign of the functional equation is consistent with the data")]
    NoConsistentSign,
    #[error("coefficient a_{0} exceeds the Weil bound")]
    WeilBoundViolation(usize),
    #[error("reciprocal roots fail the modulus check: {0}")]
    RootModulusFailure(String),
    #[error("both functional-equation signs are consistent")]
    SignAmbiguity,
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
