//! Truncated number-basis density matrices: a slow, independent check on the Gaussian engine,
//! and the only place where absorption is followed beyond first order.

mod channels;
mod matrix;
mod pipeline;

pub use channels::{
    apply_loss_kraus, apply_mpa_first_order, apply_squeeze, coherent_vector, evolve_mixed, evolve_mixed_with_tangent,
    moments, mpa_generator, prepare_displaced_squeezed, spa_generator, squeeze_unitary, MixedEvolution,
};
pub use matrix::{annihilation, creation, expm, number_operator, FockDensityMatrix, TruncationPolicy};
pub use pipeline::oracle_evaluate;
