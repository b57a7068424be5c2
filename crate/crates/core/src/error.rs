use thiserror::Error;

/// Failure signals raised by the solvers and geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point x = {x} lies outside the domain [0, {length}]")]
    Domain { x: f64, length: f64 },

    #[error("weight vanishes at x = {x}")]
    SingularWeight { x: f64 },

    #[error("step size underflow at x = {x}")]
    Stiffness { x: f64 },

    #[error("quadrature did not reach tolerance (estimated error {estimate:e})")]
    Quadrature { value: f64, estimate: f64 },

    #[error("no eigenvalue bracket found below lambda = {cap:e}")]
    BracketFailure { cap: f64 },

    #[error("no admissible bracket for the Riccati length equation: {0}")]
    InfeasibleBracket(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("weight failed validation: {0}")]
    Validation(String),

    #[error("no balanced cut found (last angle tried {theta})")]
    CutFailure { theta: f64 },

    #[error("recursion depth exceeded {0}")]
    Depth(usize),

    #[error("mesh generation failed: {0}")]
    Mesh(String),

    #[error("eigen solver failed: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
