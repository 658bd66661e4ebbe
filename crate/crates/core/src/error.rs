use thiserror::Error;

pub type Result<T> = std::result::Result<T, PcError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PcError {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("dimension {n} is too small, at least {min} required")]
    DimensionTooSmall { n: usize, min: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operation requires a {expected}x{expected} matrix, got {actual}x{actual}")]
    WrongDimension { expected: usize, actual: usize },

    #[error("entry ({row}, {col}) = {value} is not a finite positive number")]
    NonPositiveEntry { row: usize, col: usize, value: f64 },

    #[error("entry ({row}, {col}) = {value} is outside the supported range [1e-15, 1e15]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },

    #[error("reciprocity violated at ({row}, {col}): product {product} deviates from 1 by more than {tol}")]
    ReciprocityViolation {
        row: usize,
        col: usize,
        product: f64,
        tol: f64,
    },

    #[error("diagonal entry {index} = {value} is not 1")]
    BadDiagonal { index: usize, value: f64 },

    #[error("entry ({row}, {col}) = {value} is not finite")]
    NonFiniteEntry { row: usize, col: usize, value: f64 },

    #[error("matrix is not skew-symmetric at ({row}, {col}): deviation {deviation}")]
    NotSkew {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("exponential overflow: entry magnitude {value} exceeds {limit}")]
    Overflow { value: f64, limit: f64 },

    #[error("inputs are not members of the claimed subgroup {set}")]
    MembershipViolation { set: &'static str },

    #[error("{labels} labels supplied for {n} entities")]
    LabelMismatch { labels: usize, n: usize },

    #[error("invalid tolerance {name} = {value}: must lie in (0, 1)")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
