use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("move {index} is not in the kernel of the configuration matrix")]
    NotInKernel { index: usize },

    #[error("move {index} is the zero vector")]
    ZeroMove { index: usize },

    #[error("move {index} duplicates move {other} up to sign")]
    DuplicateMove { index: usize, other: usize },

    #[error("basis vectors are linearly dependent")]
    DependentBasis,

    #[error("matrix is not a simple-corruption matrix: {0}")]
    NotSimpleCorruption(String),

    #[error("pivot columns do not form an invertible submatrix")]
    SingularPivots,

    #[error("pivot solution for free column {column} is not integral")]
    NonIntegralPivotSolution { column: usize },

    #[error("invalid pivot selection: {0}")]
    InvalidPivots(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parameter {name} = {value} outside [0, 1]")]
    ParameterRange { name: String, value: f64 },

    #[error("column {column} is unbounded in the fiber; supply a zero-column bound")]
    MissingBound { column: usize },

    #[error("fiber enumeration exceeded the cap of {cap} elements")]
    FiberTooLarge { cap: usize },

    #[error("fiber is empty")]
    EmptyFiber,

    #[error("vector is not an element of the fiber")]
    NotInFiber,

    #[error("matrix fingerprint mismatch: {left} vs {right}")]
    FingerprintMismatch { left: String, right: String },

    #[error("unsupported model family for {0}")]
    UnsupportedFamily(String),

    #[error("move set is empty")]
    EmptyMoveSet,

    #[error("invalid sampler configuration: {0}")]
    Config(String),

    #[error("initial state is infeasible: {0}")]
    InfeasibleInit(String),

    #[error("unknown field {0}")]
    UnknownField(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
