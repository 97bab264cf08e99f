//! Driven N-level quantum dynamics in the SU(N) coherence-vector picture.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`] builds su(N) generator sets, structure constants and the
//!   adjoint representation.
//! * [`coherence`] maps density matrices and Hamiltonians onto coherence and
//!   torque vectors and builds the equation-of-motion matrix `g` by two
//!   independent routes (commutator extraction and torque/structure-constant
//!   contraction).
//! * [`dynamics`] propagates states with a Liouville RK4 oracle, RK4 on the
//!   coherence vector, and the exponential (first-order Magnus) propagator for
//!   self-commuting families.
//! * [`constants`] handles frame rotations, block detection and conserved
//!   subspace norms.
//! * [`wei_norman`] implements the product-of-exponentials propagator for the
//!   SU(2) adjoint dynamics.
//! * [`cli`] is the configuration-driven front end used by the `sundyn` binary.
//!
//! Units: ħ = 1 and frequencies are in radians per unit time. The Liouville
//! equation is taken as `i dρ/dt = [H, ρ]`. Generator indices are zero-based
//! throughout the API.

pub mod algebra;
pub mod cli;
pub mod coherence;
pub mod constants;
pub mod dynamics;
mod error;
pub mod expm;
pub mod pulse;
pub mod tol;
pub mod wei_norman;

pub use error::{Error, Result};

pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for operators on the N-dimensional Hilbert space.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense real matrix used for (N²−1)-dimensional coherence-space operators.
pub type RMatrix = nalgebra::DMatrix<f64>;
/// Dense real vector.
pub type RVector = nalgebra::DVector<f64>;
