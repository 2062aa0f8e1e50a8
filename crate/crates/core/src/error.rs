use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("malformed scalar `{0}`")]
    MalformedScalar(alloc::string::String),
    #[error("zero denominator in scalar")]
    ZeroDenominator,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty family")]
    EmptyFamily,
    #[error("basis columns are linearly dependent")]
    DependentBasis,
    #[error("operation requires float mode")]
    UnsupportedInExactMode,
    #[error("too few vectors: {m} vectors in dimension {n}")]
    TooFewVectors { m: usize, n: usize },
    #[error("{what} = {value} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },
    #[error("member {member} is not spanned by canonical basis vectors")]
    NonAxisAligned { member: usize },
    #[error("transform is not orthogonal")]
    NonUnitary,
    #[error("member {member}: not a valid internal projection")]
    InvalidProjection { member: usize },
    #[error("member {member}: local vector {vector} lies outside its subspace")]
    NotInSubspace { member: usize, vector: usize },
    #[error("member {member} is not contained in the leading coordinate block")]
    ContainmentViolation { member: usize },
    #[error("member {member} has a non-positive weight")]
    NonPositiveWeight { member: usize },
    #[error("epsilon must lie in (0, 1), got {0}")]
    EpsilonOutOfRange(f64),
    #[error("norm bounds violated at index {index}")]
    BoundSandwich { index: usize },
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(&'static str),
}
