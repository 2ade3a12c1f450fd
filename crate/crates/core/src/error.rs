use thiserror::Error;

/// Errors produced by the computational core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is even; only odd primes are supported")]
    EvenModulus(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands use different moduli ({0} vs {1})")]
    MixedModulus(u64, u64),
    #[error("Heisenberg elements use different coordinate conventions")]
    ConventionMismatch,
    #[error("{what} exceeds cap: {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },
    #[error("matrix has determinant {0}, expected 1")]
    Determinant(u64),
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("source vectors lie on one line through the origin")]
    DependentBasis,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("set is empty")]
    EmptySet,
    #[error("missing parameter `{0}`")]
    MissingParam(&'static str),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0} does not divide p - 1 = {1}")]
    NotADivisor(u64, u64),
    #[error("cannot pick {needed} elements from a fiber of size {available}")]
    InfeasibleFiber { needed: usize, available: usize },
    #[error("line does not pass through the origin")]
    NotOriginLine,
    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("residue {value} out of range for p = {p}")]
    OutOfRange { value: u64, p: u64 },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
