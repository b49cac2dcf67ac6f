use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid mesh: {0}")]
    Validation(String),
    #[error("edge ({0}, {1}) is shared by more than two cells")]
    NonManifoldEdge(usize, usize),
    #[error("cell {cell} has non-positive signed area {area:e}")]
    NegativeArea { cell: usize, area: f64 },
    #[error("cell {0} is inverted or degenerate")]
    DegenerateCell(usize),
    #[error("diamond of edge ({a}, {b}) is not admissible: {reason}")]
    NonConvexDiamond { a: usize, b: usize, reason: String },
    #[error("invalid generator parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("state has a non-positive entry {value:e} at unknown {index}")]
    NonPositiveState { index: usize, value: f64 },
    #[error("penalization exponent beta = {0} must lie in the open interval (0,2)")]
    BadBeta(f64),
    #[error("anisotropy tensor is not symmetric positive definite: {0}")]
    NotSpd(String),
    #[error("initial data has a negative cell mean {value:e} at unknown {index}")]
    NegativeInitialData { index: usize, value: f64 },
    #[error("invalid scheme parameter: {0}")]
    BadParameter(String),
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("Newton did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),
    #[error("singular matrix: {0}")]
    SingularMatrix(String),
    #[error("positivity backtracking exhausted after {0} halvings")]
    PositivityBacktrackExhausted(usize),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// Umbrella error for drivers that touch several layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("configuration error: {0}")]
    Config(String),
}
