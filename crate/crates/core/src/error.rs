use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("generator count mismatch: {left} vs {right}")]
    GeneratorCountMismatch { left: u32, right: u32 },

    #[error("generator index {index} out of range for {count} generators")]
    GeneratorOutOfRange { index: u32, count: u32 },

    #[error("matrix shape mismatch: ({m1}|{n1}) vs ({m2}|{n2})")]
    ShapeMismatch { m1: usize, n1: usize, m2: usize, n2: usize },

    #[error("operation requires homogeneous parity, got a mixed-parity operand")]
    MixedParity,

    #[error("parity error: {0}")]
    Parity(String),

    #[error("Berezinian undefined: lower-right block is not invertible")]
    BerezinianUndefined,

    #[error("non-finite value encountered in numeric computation")]
    NonFinite,

    #[error("coefficient vector has length {got}, algebra dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("basis matrices are linearly dependent")]
    DependentBasis,

    #[error("bracket of basis elements {i} and {j} lies outside the matrix span")]
    NotClosed { i: usize, j: usize },

    #[error("ad image of drift leaves the algebra at basis element '{element}'")]
    NotInvariant { element: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown catalog entry '{0}'")]
    UnknownCatalog(String),

    #[error("unknown system '{system}' in catalog entry '{entry}'")]
    UnknownSystem { entry: String, system: String },

    #[error("system requires a matrix realization but the algebra has none")]
    MissingRealization,

    #[error("control arity mismatch: schedule has ({even}|{odd}) inputs, system expects ({k}|{l})")]
    ArityMismatch { even: usize, odd: usize, k: usize, l: usize },

    #[error("spec file error at {field}: {message}")]
    SpecFile { field: String, message: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
