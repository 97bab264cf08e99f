//! Numerical tolerances shared across the crate.

/// Entrywise Hermiticity of raw operator input.
pub const HERMITIAN: f64 = 1e-12;
/// Generator tracelessness and trace orthonormality.
pub const GENERATOR: f64 = 1e-12;
/// Imaginary residue allowed when extracting a quantity that must be real.
pub const IMAG_RESIDUE: f64 = 1e-10;
/// Jacobi identity and commutator reconstruction.
pub const ALGEBRA: f64 = 1e-10;
/// Unit trace of a density matrix.
pub const TRACE: f64 = 1e-12;
/// Smallest eigenvalue accepted for a density matrix.
pub const POSITIVITY: f64 = -1e-10;
/// Slack on the coherence-vector norm bound `|v|² ≤ 2(N−1)/N`.
pub const NORM_BOUND: f64 = 1e-10;
/// Antisymmetry of equation-of-motion matrices.
pub const ANTISYMMETRY: f64 = 1e-12;
/// Hermiticity residue accepted after each Liouville step.
pub const HERMITIZATION: f64 = 1e-9;
/// Trace drift that aborts a Liouville propagation.
pub const TRACE_DRIFT: f64 = 1e-6;
/// Commuting-family test on sampled time pairs.
pub const COMMUTING: f64 = 1e-10;
/// Cutoff below which an entry of `g` does not link two indices.
pub const BLOCK_COUPLING: f64 = 1e-10;
/// Default floor on `|cos Υ₂|` for the Wei-Norman parameter equations.
pub const WN_SINGULARITY_FLOOR: f64 = 1e-6;
/// Relative resubstitution residual of `W Υ̇ = Γ`.
pub const WN_RESUBSTITUTION: f64 = 1e-12;
/// Relative residual of the |Δ| magnitude identity along a Wei-Norman run.
pub const WN_MAGNITUDE_IDENTITY: f64 = 1e-8;
/// Minimum number of sample times for commuting-family checks.
pub const MIN_COMMUTING_SAMPLES: usize = 8;
