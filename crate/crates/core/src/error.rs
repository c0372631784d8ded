use thiserror::Error;

/// Every way an operation in this crate can refuse its input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a generalized Cartan matrix: {0}")]
    NotGcm(String),
    #[error("unsupported Cartan type: {0}")]
    UnsupportedType(String),
    #[error("vectors belong to different root data (rank {expected} vs {found})")]
    DatumMismatch { expected: usize, found: usize },
    #[error("node index {0} is outside the index set")]
    IndexOutOfRange(usize),
    #[error("length cap {0} exceeded while reducing a Weyl word")]
    LengthCap(usize),
    #[error("w(a_{0}) is negative, so the pair is not produced in this orientation")]
    Orientation(usize),
    #[error("not a root: {0}")]
    NotARoot(String),
    #[error("subsets are not nested: {0}")]
    Nesting(String),
    #[error("the decomposition is undefined for J = I")]
    FullSet,
    #[error("vector is not in the required subspace: {0}")]
    NotInSubspace(String),
    #[error("malformed sequence spec: {0}")]
    MalformedSpec(String),
    #[error("orthogonal family support needs at least two Borel subsets")]
    EmptySupport,
    #[error("vector is not dominant: <T, a_{0}> < 0")]
    NotDominant(usize),
    #[error("the reduced chain leaves the family support")]
    ChainLeavesSupport,
    #[error("empty or degenerate window")]
    EmptyWindow,
    #[error("matrix is not in the pro-unipotent shape: {0}")]
    NotUnipotentShape(String),
    #[error("truncation orders differ ({0} vs {1})")]
    OrderMismatch(usize, usize),
    #[error("reduction did not terminate within {0} rounds")]
    NonTermination(usize),
    #[error("torus point is not in A+_P: a^(a_{0}) != 1")]
    WrongParabolic(usize),
    #[error("no semi-stability oracle registered for the Levi of {0}")]
    UndecidableLevi(String),
    #[error("outside the decidable domain: {0}")]
    Undecided(String),
    #[error("empty candidate list")]
    Empty,
    #[error("unknown sweep suite {0:?}")]
    UnknownSuite(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
