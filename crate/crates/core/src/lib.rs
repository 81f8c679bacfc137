//! Curvature-type tensors of bounded symmetric domains, their Mok
//! characteristic cones, and recovery of a product of irreducible domains
//! from the dimensions of those cones.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor_space`]: block-decomposed tangent spaces, operators on
//!   `T ⊗ T∨`, numerical kernels and holonomy invariance checks.
//! * [`jts`]: octonions and the Jordan triple systems of the six irreducible
//!   families, with the Jordan rank-one test.
//! * [`curvature`]: curvature-type tensors built from triple systems, product
//!   assembly, holonomy sampling and the Schur block-structure report.
//! * [`charvar`]: characteristic cones, their dimensions and decomposition.
//! * [`classify`]: the `(dim D, dim S¹)` table, its inverse and cover recovery.
//! * [`cli`]: the JSON-producing commands behind the `domain-oracle` binary.

pub mod charvar;
pub mod classify;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod jts;
pub mod par;
pub mod sampling;
pub mod tensor_space;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Default relative threshold for numerical rank decisions.
pub const DEFAULT_TOL_RANK: f64 = 1e-8;
/// Default relative threshold for Jacobian / span ranks.
pub const DEFAULT_TOL_JAC: f64 = 1e-6;
/// Default seed for every randomized routine.
pub const DEFAULT_SEED: u64 = 0;
