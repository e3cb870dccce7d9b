use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation at a singularity (|denominator| = {magnitude:e} at s = {re} + {im}j)")]
    Singular { re: f64, im: f64, magnitude: f64 },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("eigenvalue iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("phase unwrap ambiguity between {omega_lo} and {omega_hi} rad/s (step {step_deg:.1} deg); densify the grid")]
    UnwrapAmbiguity {
        omega_lo: f64,
        omega_hi: f64,
        step_deg: f64,
    },

    #[error("delay design rejected: {0}")]
    Design(String),

    #[error("simulation config: {0}")]
    SimConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
