use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("length mismatch: expected {expected} samples, got {got}")]
    Length { expected: usize, got: usize },

    #[error("field does not decay at the boundary: |f| = {magnitude:e} at index {index}")]
    NoDecay { index: usize, magnitude: f64 },

    #[error("depth condition violated: h = {depth:e} at {location}")]
    Depth { depth: f64, location: String },

    #[error("no crest: curvature radicand {radicand:e} is negative for amplitude {amplitude}")]
    NoCrest { amplitude: f64, radicand: f64 },

    #[error("traveling ODE is singular: |zeta'| = {dzeta:e} below threshold {threshold:e}")]
    Singular { dzeta: f64, threshold: f64 },

    #[error("shooting did not converge in bracket [{lo}, {hi}]: {reason}")]
    NoConvergence { lo: f64, hi: f64, reason: String },

    #[error("ODE integration failed at x = {x}: {reason}")]
    Integration { x: f64, reason: String },

    #[error("quadrature did not converge: achieved error estimate {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("linear solver breakdown after {iterations} iterations, relative residual {residual:e}")]
    Solver { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
