use thiserror::Error;

/// Errors produced by the library operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("simplex {0:?} does not have strictly increasing vertices")]
    NonIncreasingSimplex(Vec<usize>),

    #[error("simplex must have at least one vertex")]
    EmptySimplex,

    #[error("simplex {0:?} is not part of the complex")]
    UnknownSimplex(Vec<usize>),

    #[error("order {order} is out of range (complex has maximal order {max_order:?})")]
    InvalidOrder { order: usize, max_order: Option<usize> },

    #[error("boundary operator of order 0 is identically zero; use the Hodge Laplacian instead")]
    ZeroOrderBoundary,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("filter is not shift-invariant with respect to the basis (max off-diagonal {max_off_diagonal:e})")]
    NotShiftInvariant { max_off_diagonal: f64 },

    #[error("connected component containing vertex {vertex} has no labels")]
    UnlabeledComponent { vertex: usize },

    #[error("index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },

    #[error("duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("least-squares system is rank deficient; use alpha > 0 to fix flows along unlabeled cycles")]
    RankDeficient,

    #[error("zero variance input")]
    ZeroVariance,

    #[error("nonlinearity {0} is not odd")]
    NotOdd(String),

    #[error("unknown regularizer {0:?} (expected hodge, edge or line-graph)")]
    UnknownRegularizer(String),

    #[error("layer {layer}: {detail}")]
    LayerMismatch { layer: usize, detail: String },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("fixed-point iteration did not converge after {0} iterations")]
    NotConverged(usize),

    #[error("eigensolver did not converge after {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("imaginary residue {0:e} exceeds tolerance")]
    ImaginaryResidue(f64),

    #[error("parse error on line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error("missing values for simplices: {0}")]
    MissingSimplices(String),
}

pub type Result<T> = std::result::Result<T, Error>;
