use thiserror::Error;

use crate::stationary::ContractionCertificate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative weight {weight} at row {row}, column {col}")]
    NegativeWeight { row: usize, col: usize, weight: f64 },

    #[error("non-finite weight at row {row}, column {col}")]
    NonFiniteWeight { row: usize, col: usize },

    #[error("row {row} sums to {sum}, outside tolerance {tol} of 1")]
    RowSumOutOfTolerance { row: usize, sum: f64, tol: f64 },

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("parse error on line {line}: {message}")]
    ParseError { line: usize, message: String },

    #[error("node {node} has no out-edges and the dangling policy is `reject`")]
    DanglingNode { node: usize },

    #[error("edge list contains no edges")]
    EmptyGraph,

    #[error("matrix has dimension 0")]
    EmptyMatrix,

    #[error("damping factor {0} is outside [0, 1]")]
    DampingOutOfRange(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {n} exceeds cap {cap}")]
    DimensionCapExceeded { n: usize, cap: usize },

    #[error("n = {n} exceeds pair cap {cap}")]
    PairCapExceeded { n: usize, cap: usize },

    #[error("matrix is not square ({rows} rows, {cols} columns)")]
    NonSquare { rows: usize, cols: usize },

    #[error("entries sum to {sum}, expected {expected}")]
    NotOnSimplex { sum: f64, expected: f64 },

    #[error("matrix is not row stochastic: {0}")]
    NotStochastic(String),

    #[error("k_max must be at least 1")]
    KMaxZero,

    #[error("vector is not fixed by P: ||Pv - v||_1 = {residual}")]
    NotFixedVector { residual: f64 },

    #[error("fixed vectors are linearly dependent")]
    DependentVectors,

    #[error(
        "q(A^m) >= 1 for every m <= {max_m}; the stationary vector may not be unique, \
         inspect the closed subsets (`scc` subcommand)"
    )]
    NoContraction { max_m: usize },

    #[error("a-posteriori bound {} still above tolerance after {} iterations", .0.a_posteriori_bound, .0.iterations)]
    MaxItersExceeded(Box<ContractionCertificate>),

    #[error("QR iteration did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NegativeWeight { .. } => "NegativeWeight",
            Error::NonFiniteWeight { .. } => "NonFiniteWeight",
            Error::RowSumOutOfTolerance { .. } => "RowSumOutOfTolerance",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::ParseError { .. } => "ParseError",
            Error::DanglingNode { .. } => "DanglingNode",
            Error::EmptyGraph => "EmptyGraph",
            Error::EmptyMatrix => "EmptyMatrix",
            Error::DampingOutOfRange(_) => "DampingOutOfRange",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DimensionCapExceeded { .. } => "DimensionCapExceeded",
            Error::PairCapExceeded { .. } => "PairCapExceeded",
            Error::NonSquare { .. } => "NonSquare",
            Error::NotOnSimplex { .. } => "NotOnSimplex",
            Error::NotStochastic(_) => "NotStochastic",
            Error::KMaxZero => "KMaxZero",
            Error::NotFixedVector { .. } => "NotFixedVector",
            Error::DependentVectors => "DependentVectors",
            Error::NoContraction { .. } => "NoContraction",
            Error::MaxItersExceeded(_) => "MaxItersExceeded",
            Error::NoConvergence(_) => "NoConvergence",
            Error::InvalidTolerance(_) => "InvalidTolerance",
        }
    }
}
