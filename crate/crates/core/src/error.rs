use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quadrature did not converge: estimate {estimate} with error {error:e}")]
    QuadratureNonConvergence { estimate: Complex64, error: f64 },

    #[error("nonlinear solve failed after {iterations} iterations: residual {residual_norm:e}")]
    SolveFailed {
        iterations: usize,
        residual_norm: f64,
        best: Vec<f64>,
    },

    #[error("point {0} is a pole of the map")]
    Pole(Complex64),

    #[error("{0} is not a fixed point")]
    NotFixed(Complex64),

    #[error("{0} is not a boundary fixed point")]
    NotBoundaryFixed(Complex64),

    #[error("boundary singularity at {0}")]
    BoundarySingularity(Complex64),

    #[error("point {0} lies outside the domain")]
    OutsideDomain(Complex64),

    #[error("inverse map failed at {target}: residual {residual:e}")]
    InverseFailed { target: Complex64, residual: f64 },

    #[error("possible rotation: orbit did not converge after {0} iterations")]
    PossibleRotation(usize),

    #[error("degenerate multiplier {0}")]
    DegenerateMultiplier(f64),

    #[error("weights must match channel widths")]
    WeightMismatch,

    #[error("reduced modulus does not stabilize (last estimate {last}, spread {spread:e})")]
    ModulusUnstable { last: f64, spread: f64 },

    #[error("hit critical point at {0}")]
    CriticalPoint(Complex64),

    #[error("branch tracking failed near {0}")]
    BranchFailure(Complex64),

    #[error("missing data: {0}")]
    Missing(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
