//! Absorbance sensitivity of m-photon absorption measured through a seeded
//! two-amplifier (SU(1,1)) interferometer.
//!
//! The crate is layered bottom up:
//!
//! - [`gaussian`] tracks Gaussian light as linear maps over vacuum modes and
//!   takes expectation values by Wick pairing.
//! - [`interferometer`] assembles the measurement chain and returns detector
//!   statistics plus the first-order absorption signal.
//! - [`fock`] is an independent number-basis simulator used as a check.
//! - [`sensitivity`] holds the closed forms, including the infinite-gain limit.
//! - [`optimize`] tunes phases and squeezing and fits scaling exponents.
//! - [`units`] converts absorbances to laboratory cross sections.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod interferometer;
pub mod numerics;
pub mod optimize;
pub mod sensitivity;
pub mod units;
pub mod validation;

pub use error::{Error, Result};
pub use gaussian::{wick_expectation, GaussianScene, LinearMap, ModeLabel, OperatorPolynomial};
pub use interferometer::{evaluate, evaluate_with_spa, InterferometerConfig, SensitivityReport, SpaConfig};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/gaussian-engine.md")]
    mod gaussian_engine {}
    #[doc = include_str!("../../../book/src/interferometer.md")]
    mod interferometer {}
    #[doc = include_str!("../../../book/src/fock-oracle.md")]
    mod fock_oracle {}
    #[doc = include_str!("../../../book/src/sensitivity.md")]
    mod sensitivity {}
    #[doc = include_str!("../../../book/src/optimize.md")]
    mod optimize {}
    #[doc = include_str!("../../../book/src/units.md")]
    mod units {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
}
