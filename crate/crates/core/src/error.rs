use thiserror::Error;

/// Errors raised by the geometry engine.
///
/// Verification failures are not errors: they come back as certificates with
/// `ok = false`. The variants here cover contract violations, impossible
/// configurations and exhausted searches.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field order {0}: expected an odd prime power")]
    InvalidField(u64),
    #[error("field order {0} exceeds the supported maximum")]
    FieldTooLarge(u64),
    #[error("modulus {0:?} is not a monic irreducible polynomial of the required degree")]
    ReducibleModulus(Vec<u32>),
    #[error("element {0} is not a valid field encoding")]
    InvalidElement(u32),
    #[error("division by zero")]
    DivisionByZero,

    #[error("type {kind} is not defined in projective dimension {n}")]
    IncompatibleDimension { kind: String, n: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("form is degenerate")]
    DegenerateForm,

    #[error("polar space too large: {0}")]
    TooLarge(String),
    #[error("internal count mismatch: {0}")]
    CountMismatch(String),
    #[error("subspace is not totally singular")]
    NotSingular,
    #[error("point is not in the polar space")]
    PointNotInSpace,

    #[error("subspaces do not form a direct sum of the ambient space")]
    NotDirectSum,
    #[error("matrix is not a similarity with multiplier 1 of the form")]
    NotSimilarity,
    #[error("source and target Gram matrices differ")]
    GramMismatch,
    #[error("span of the prescribed points is degenerate")]
    DegenerateSpan,
    #[error("bad configuration: {0}")]
    BadConfiguration(String),

    #[error("point sets are not disjoint")]
    NotDisjoint,
    #[error("intersection pattern violated: {0}")]
    PatternViolation(String),
    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },
    #[error("search space exhausted after {nodes} nodes: no solution exists")]
    Exhausted { nodes: u64 },

    #[error("vectors are linearly dependent")]
    DependentVectors,
    #[error("the two parameter points coincide")]
    SamePoint,
    #[error("function pair does not define an ovoid of Q+(5,q)")]
    NotAnOvoid,
    #[error("q = {0} is not congruent to 1 mod 4")]
    BadResidue(u64),
    #[error("alpha = {0} is a square")]
    SquareAlpha(u32),
    #[error("operation requires characteristic {expected}, field has characteristic {got}")]
    WrongCharacteristic { expected: u32, got: u32 },

    #[error("search for ovoid {index} failed: {reason}")]
    SearchFailed { index: usize, reason: String },
    #[error("configuration failed: {0}")]
    ConfigurationFailed(String),
    #[error("disjointness failure: {0}")]
    DisjointnessFailure(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
