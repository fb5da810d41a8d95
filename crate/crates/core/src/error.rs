use thiserror::Error;

/// Errors raised by the numerical toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("squeezing parameter {r} exceeds the overflow guard {limit}")]
    SqueezeOverflow { r: f64, limit: f64 },

    #[error("squeezing parameter must be non-negative and finite, got {0}")]
    InvalidSqueeze(f64),

    #[error("transmission must lie in [0, 1], got {0}")]
    TransmissionOutOfRange(f64),

    #[error("polynomial degree {degree} exceeds the supported maximum {max}")]
    DegreeOverflow { degree: usize, max: usize },

    #[error("mode {mode} is not present in a scene with {modes} modes")]
    UnknownMode { mode: usize, modes: usize },

    #[error("absorption order m = {0} is not supported (expected 1..=4)")]
    UnsupportedOrder(u32),

    #[error("r1 = {r1} exceeds arcsinh(sqrt(n_s)) = {limit} for n_s = {n_s}")]
    InfeasibleSqueeze { r1: f64, n_s: f64, limit: f64 },

    #[error(
        "photon number {n_s} cannot be reached at phi_las = {phi_las}: quadrature factor {factor} is not positive"
    )]
    DegenerateQuadrature { n_s: f64, phi_las: f64, factor: f64 },

    #[error("infinite r2 has no finite-pipeline evaluation; use the closed-form limit")]
    InfiniteR2,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: relative drift {drift:e} between orders {low} and {high}")]
    QuadratureNonConvergence { low: usize, high: usize, drift: f64 },

    #[error("Fock cutoff exhausted: tail population {tail:e} at dimension {dim} (max {max_dim})")]
    CutoffExhausted { dim: usize, max_dim: usize, tail: f64 },

    #[error("time stepping did not converge: <n> changed by {change:e} when halving the step")]
    StepNonConvergence { change: f64 },

    #[error("bisection bracket failure: {0}")]
    BracketFailure(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("unit mismatch: {0}")]
    UnitMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
