//! Tuning the interferometer at fixed sample photon number, and scaling-exponent fits.

mod phases;
mod scaling;
mod squeeze;

pub use phases::{optimize_phases, phase_grid, PhaseOptimum, PhaseSearch};
pub use scaling::{default_scaling_grid, scaling_exponent, ScalingFit};
pub use squeeze::{
    optimal_state_condition, optimize_r1, optimize_r1_limit, sample_quadratures, OptimizationResult, SampleQuadratures,
    SqueezeSearch,
};
