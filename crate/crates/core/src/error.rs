use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Last state of a Newton iteration that did not converge.
#[derive(Debug, Clone)]
pub struct NewtonFailure {
    pub last_iterate: Vec<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dangling node index {node} in element {element}")]
    DanglingNode { element: usize, node: i64 },

    #[error("duplicate region name `{0}`")]
    DuplicateRegion(String),

    #[error("duplicate set name `{0}`")]
    DuplicateSet(String),

    #[error("zero-area element {0}")]
    ZeroArea(usize),

    #[error("unknown region `{0}`")]
    UnknownRegion(String),

    #[error("unknown boundary set `{0}`")]
    UnknownSet(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("non-finite entry assembled from element {0}")]
    NonFinite(usize),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("newton did not converge after {} iterations (residual {:.3e})", .0.iterations, .0.residual_norm)]
    Newton(Box<NewtonFailure>),

    #[error("return mapping failed at quadrature point {0}")]
    ReturnMap(usize),

    #[error("time step collapsed below {0:e} s")]
    StepCollapse(f64),

    #[error("porosity target unreachable: {0}")]
    Porosity(String),

    #[error("defect segment leaves the wall: {0}")]
    DefectOutsideWall(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
