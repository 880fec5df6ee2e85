use thiserror::Error;

/// Errors produced by the group, set, transform and pipeline operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invariant factor {0} is smaller than 2")]
    InvalidFactor(u64),
    #[error("group order overflows the supported range")]
    OrderOverflow,
    #[error("element has {found} coordinates, group has {expected} factors")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("coordinate {coord} is out of range for factor {factor}")]
    CoordinateOutOfRange { coord: u64, factor: u64 },
    #[error("index {index} is out of range for a group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("operands live in different groups ({left} vs {right})")]
    GroupMismatch { left: String, right: String },
    #[error("{what}: size {actual} exceeds the limit {limit}")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("the function is identically zero")]
    ZeroFunction,
    #[error("numerical residual too large: {0}")]
    Precision(String),
    #[error("the set is empty")]
    EmptySet,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("operation requires a group of the form F2^n")]
    NotBoolean,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no irreducible polynomial of degree {degree} over F{p} was found")]
    NoIrreducible { p: u64, degree: u32 },
    #[error("no energy jump for k in [2, {k0}]; energies: {energies:?}")]
    NoJump { k0: u32, energies: Vec<String> },
    #[error("density guarantee failed: {hits} hits, {required} required ({detail})")]
    DensityGuaranteeFailed {
        hits: usize,
        required: String,
        detail: String,
    },
    #[error("inclusion failed: element {element} of the structured set is not in A-A")]
    InclusionFailed { element: usize },
    #[error("hypotheses failed: {0}")]
    HypothesisFailed(String),
    #[error("no regular radius found after densification ({trace})")]
    RegularRadiusNotFound { trace: String },
    #[error("search cap of {0} nodes exceeded")]
    SearchCapExceeded(usize),
    #[error("memory cap exceeded: {0}")]
    MemoryCap(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
