//! Quantum Fisher information for unitary parametrization processes.
//!
//! For `ρ(α) = U(α) ρ₀ U†(α)` every piece of parameter dependence is carried
//! by the Hermitian generator `𝓗 = i(∂_α U†)U`. This crate computes `𝓗`
//! (several independent backends, see [`generator`]), and from `𝓗` and the
//! initial state the quantum Fisher information, QFI matrices, and SLD/RLD
//! operators ([`fisher`]). [`spin`] holds collective-spin models with exact
//! closed forms that double as oracles for the generic routines.

pub mod error;
pub mod fisher;
pub mod generator;
pub mod operator;
pub mod spin;
pub mod tolerance;

pub use error::{Error, Result};
pub use operator::{
    adjoint_apply, bloch_from_density, density_from_bloch, evolve_unitary, spectral_decompose,
    BlochVector, ComplexMatrix, DensityMatrix, HermitianOperator, SpectralDecomposition,
    StateVector,
};
pub use tolerance::Tolerances;
pub use num_complex::Complex64;
