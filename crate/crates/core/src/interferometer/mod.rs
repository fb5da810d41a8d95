//! The seeded two-amplifier interferometer with an absorbing sample between the amplifiers.

mod config;
mod pipeline;

pub(crate) use config::check_order;
pub use config::{amplitude_for_ns, max_r1, photons_at_sample, Drive, InterferometerConfig, MpaModel, SecondSqueeze};
pub use pipeline::{
    downstream_scene, evaluate, evaluate_with_spa, linear_polynomial, mpa_adjoint, mpa_adjoint_on, number_moments,
    sample_scene, signal_derivative, SensitivityReport, SpaConfig,
};
