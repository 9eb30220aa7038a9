//! Actuator placement via the Brunovsky normal form.
//!
//! Builds the Brunovsky basis of a single-input pair `(A, b)`, evaluates the
//! Gram objective `λ₁(P(b)P(b)ᵀ)`, maximizes it over the unit sphere and
//! compares the factored control-cost bound with the exact minimum-energy cost.

pub mod brunovsky;
pub mod cost;
pub mod error;
pub mod matrix;
pub mod optimizer;
pub mod spectral;
pub mod systems;

pub use brunovsky::{
    basis_matrix, companion, gram, inverse_norm, verify_brunovsky, BrunovskyBasis, CompanionMatrix,
    GramMatrix, GramOperator,
};
pub use cost::{blowup_exponent, exact_cost, expm, gramian, kappa, CostReport, Gramian};
pub use error::{Error, Result};
pub use matrix::{char_poly, kalman_matrix, kalman_rank, CharacteristicPolynomial, DenseMatrix, RealVector};
pub use optimizer::{differential_evolution, multi_start, project_to_sphere, DEConfig, OptimizationResult};
pub use spectral::{jacobi_spectrum, lambda1, objective, power_largest, smallest_eig_shifted, Objective};
pub use systems::{InputMap, Scaling, System, SystemKind, SystemSpec};
