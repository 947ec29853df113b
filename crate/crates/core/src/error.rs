use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: weight {weight} is not strictly positive and finite")]
    NonPositiveWeight { line: usize, weight: f64 },

    #[error("line {line}: self-loop on node '{label}'")]
    SelfLoop { line: usize, label: String },

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("graph needs at least 2 nodes, found {0}")]
    TooFewNodes(usize),

    #[error("not a Laplacian matrix: failed {0}")]
    NotALaplacian(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("shifted Laplacian is numerically singular")]
    SingularShift,

    #[error("expected exactly one zero eigenvalue, found {zeros}")]
    RankDeficient { zeros: usize },

    #[error("kernel is not spanned by the constant vector (residual {0:e})")]
    KernelNotConstant(f64),

    #[error("index {index} out of range for order {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("vertices are not affinely independent")]
    DegenerateSimplex,

    #[error("distance matrix does not describe a nondegenerate simplex (squared volume {0:e})")]
    DegenerateDistanceMatrix(f64),

    #[error("index subset is empty")]
    EmptySubset,

    #[error("index {0} appears more than once")]
    DuplicateIndex(usize),

    #[error("face needs at least 2 vertices, got {0}")]
    FaceTooSmall(usize),

    #[error("kept node set is empty")]
    EmptyKeptSet,

    #[error("single-node elimination needs at least 3 nodes, got {0}")]
    TooSmall(usize),

    #[error("inner subset is not contained in the outer subset (index {0})")]
    SubsetViolation(usize),

    #[error("diagonal entry {index} is {value:e}, expected 0")]
    NonZeroDiagonal { index: usize, value: f64 },

    #[error("entries ({i}, {j}) and ({j}, {i}) differ")]
    Asymmetric { i: usize, j: usize },

    #[error("unknown node label '{0}'")]
    UnknownLabel(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}
