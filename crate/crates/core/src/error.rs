use thiserror::Error;

/// Errors raised while validating inputs to the library.
///
/// Matrix positions and divisor-chain positions are 1-based. Element indices
/// (Cayley tables, function tables, vertices) are 0-based, matching the
/// specification file format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("argument must be positive, got 0")]
    Zero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{a} is not a unit modulo {m}")]
    NotUnit { a: i64, m: u64 },
    #[error("expected an odd integer, got {0}")]
    EvenUnit(i64),
    #[error("exponent {0} is too small (need k >= 3)")]
    ExponentTooSmall(u32),
    #[error("value {value} is outside the range {lo}..={hi}")]
    OutOfRange { value: u64, lo: u64, hi: u64 },

    #[error("matrix entry ({row}, {col}) breaks well-definedness: a_ij * m_j is not 0 mod m_i")]
    WellDefinednessViolation { row: usize, col: usize },
    #[error("map is not a homomorphism: f({x}*{y}) != f({x})*f({y})")]
    HomomorphismViolation { x: usize, y: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),
    #[error("unknown built-in group {0:?} (expected S3, D4 or Q8)")]
    UnknownGroup(String),
    #[error("group is too large to enumerate ({0} elements)")]
    TooLarge(u128),
    #[error("cannot take the product of an abelian and a table-backed system")]
    MixedKinds,
    #[error("subset is not a subgroup invariant under the endomorphism")]
    NotInvariantSubgroup,

    #[error("vertex {vertex} has only {available} successor generations, {requested} requested")]
    InsufficientGenerations {
        vertex: usize,
        available: usize,
        requested: usize,
    },
    #[error("divisor chain breaks at position {0}: a_{{i+1}} does not divide a_i")]
    DivisibilityViolation(usize),
    #[error("component orders {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("invalid specification: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
