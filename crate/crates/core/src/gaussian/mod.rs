//! Gaussian states as linear maps over vacuum modes, with Wick evaluation of
//! operator polynomials.

mod map;
mod polynomial;
mod scene;
mod wick;

pub use map::{LinearMap, ModeLabel};
pub use polynomial::{Factor, Ladder, Monomial, OperatorPolynomial};
pub use scene::{GaussianScene, DEFAULT_SQUEEZE_GUARD};
pub use wick::{real_expectation, wick_expectation, MAX_DEGREE};
