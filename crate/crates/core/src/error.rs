use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("vector does not lie in the expected space/span: {0}")]
    NotInSpan(String),

    #[error("monomial degree {degree} leaves the truncation window [{lo}, {hi}]")]
    TruncationOverflow { degree: i64, lo: i64, hi: i64 },

    #[error("invalid group tables: {0}")]
    InvalidGroup(String),

    #[error("group is not in the built-in catalogue: {0}")]
    UnsupportedGroup(String),

    #[error("ideal generator is not in the counit kernel: {0}")]
    GeneratorNotInKerEps(String),

    #[error("right ideal is not Ad-invariant, witness element: {0}")]
    NotAdInvariant(String),

    #[error("reflection set is not closed under conjugation: {0}")]
    NotConjugationClosed(String),

    #[error("germ operation is not well defined on cosets, witness: {0}")]
    IllDefined(String),

    #[error("group action is not free, witness orbit of {0}")]
    NotFree(String),

    #[error("missing corepresentation data: {0}")]
    MissingCorepresentation(String),

    #[error("degree {0} exceeds the computed degree cap {1}")]
    DegreeOverflow(usize, usize),

    #[error("map is not convolution invertible, singular in degree {0}")]
    NotConvolutionInvertible(usize),

    #[error("polynomial is not exactly divisible by {0}")]
    DivisibilityFailure(String),

    #[error("unsupported root system: {0}")]
    UnsupportedRootSystem(String),

    #[error("scenario parse error: {0}")]
    Parse(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
