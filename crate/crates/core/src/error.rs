use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("singular geometry: {0}")]
    SingularGeometry(String),

    #[error("inverted element {element} (det F = {det:e})")]
    InvertedElement { element: usize, det: f64 },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("nonpositive film thickness h = {h:e} at slave node {node}")]
    ModelViolation { node: usize, h: f64 },

    #[error("mesh format error at line {line}: {msg}")]
    MeshFormat { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("newton did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("time step failed after {halvings} halvings at t = {time}: {cause}")]
    StepFailed {
        time: f64,
        halvings: usize,
        cause: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
