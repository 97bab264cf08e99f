//! Randomised cross-check of the commutator and torque routes to `g`, plus the
//! algebra invariants, for N = 2..n_max.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    adjoint_commutator_residual, reconstruction_residual, structure_constants, GeneratorSet, HermitianMatrix,
};
use crate::coherence::{
    eom_matrix_commutator, eom_matrix_torque, hamiltonian_to_torque, route_agreement_residual, TorqueVector,
};
use crate::pulse::{DetuningMode, PulseProfile, Shape};
use crate::{tol, CMatrix, Error, RMatrix, Result, C64};

/// Hermitian matrix with entries drawn uniformly from `[-scale, scale]`.
pub fn random_hermitian<R: Rng>(n: usize, scale: f64, rng: &mut R) -> HermitianMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale)));
    HermitianMatrix::hermitize(&m)
}

#[derive(Clone, Debug)]
pub struct VerifyRow {
    pub n: usize,
    pub trials: usize,
    pub max_route_gap: f64,
    pub max_antisymmetry: f64,
    pub generator_residual: f64,
    pub jacobi: f64,
    pub reconstruction: f64,
    pub adjoint_closure: f64,
}

impl VerifyRow {
    pub fn passes(&self) -> bool {
        self.max_route_gap < tol::ALGEBRA
            && self.max_antisymmetry < tol::ANTISYMMETRY
            && self.generator_residual < tol::GENERATOR
            && self.jacobi < tol::ALGEBRA
            && self.reconstruction < tol::ALGEBRA
            && self.adjoint_closure < tol::ALGEBRA
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub seed: u64,
    pub rows: Vec<VerifyRow>,
    /// Max deviation of both routes from the literal two-level matrix
    /// `[[0, Δ, 0], [−Δ, 0, −Ω], [0, Ω, 0]]`.
    pub two_level_literal: f64,
}

/// Tolerance for the literal two-level comparison.
pub const TWO_LEVEL_LITERAL_TOL: f64 = 1e-14;

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(VerifyRow::passes) && self.two_level_literal < TWO_LEVEL_LITERAL_TOL
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> =
            self.rows.iter().filter(|r| !r.passes()).map(|r| format!("N={} exceeds tolerance: {r:?}", r.n)).collect();
        if self.two_level_literal >= TWO_LEVEL_LITERAL_TOL {
            out.push(format!("two-level literal g deviates by {:e}", self.two_level_literal));
        }
        out
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(
            f,
            "{:>3} {:>7} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}  status",
            "N", "trials", "|g_c - g_t|", "antisym", "generators", "jacobi", "commutator", "adjoint"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>3} {:>7} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}  {}",
                r.n,
                r.trials,
                r.max_route_gap,
                r.max_antisymmetry,
                r.generator_residual,
                r.jacobi,
                r.reconstruction,
                r.adjoint_closure,
                if r.passes() { "ok" } else { "FAIL" }
            )?;
        }
        writeln!(
            f,
            "two-level literal g: {:.3e}  {}",
            self.two_level_literal,
            if self.two_level_literal < TWO_LEVEL_LITERAL_TOL { "ok" } else { "FAIL" }
        )
    }
}

/// Max deviation of both routes from the literal two-level matrix at `samples`
/// random `(Ω, Δ)` pairs.
pub fn two_level_literal_check<R: Rng>(samples: usize, rng: &mut R) -> Result<f64> {
    let gens = GeneratorSet::build(2)?;
    let f = structure_constants(&gens)?;
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let omega = rng.gen_range(-5.0..5.0);
        let delta = rng.gen_range(-5.0..5.0);
        let pulse = PulseProfile::new(Shape::Constant, omega, delta, DetuningMode::Constant)?;
        #[rustfmt::skip]
        let literal = RMatrix::from_row_slice(3, 3, &[
            0.0,    delta,  0.0,
            -delta, 0.0,    -omega,
            0.0,    omega,  0.0,
        ]);
        let by_comm = eom_matrix_commutator(&pulse.hamiltonian(0.0), &gens)?;
        let by_torque = eom_matrix_torque(&TorqueVector::from_slice(&pulse.torque(0.0)), &f)?;
        worst = worst.max((&by_comm.matrix - &literal).amax()).max((&by_torque.matrix - &literal).amax());
    }
    Ok(worst)
}

pub fn verify(n_max: usize, trials: usize, seed: u64) -> Result<VerifyReport> {
    if n_max < 2 {
        return Err(Error::Config(format!("--n-max must be at least 2, got {n_max}")));
    }
    if trials == 0 {
        return Err(Error::Config("--trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for n in 2..=n_max {
        let gens = GeneratorSet::build(n)?;
        let f = structure_constants(&gens)?;
        let audit = gens.audit();
        let mut row = VerifyRow {
            n,
            trials,
            max_route_gap: 0.0,
            max_antisymmetry: 0.0,
            generator_residual: audit.max_trace.max(audit.max_orthonormality).max(audit.max_hermiticity),
            jacobi: f.jacobi_residual(),
            reconstruction: reconstruction_residual(&gens, &f),
            adjoint_closure: adjoint_commutator_residual(&f)?,
        };
        for _ in 0..trials {
            let h = random_hermitian(n, 1.0, &mut rng);
            row.max_route_gap = row.max_route_gap.max(route_agreement_residual(&h, &gens, &f)?);
            let by_comm = eom_matrix_commutator(&h, &gens)?;
            let by_torque = eom_matrix_torque(&hamiltonian_to_torque(&h, &gens)?, &f)?;
            row.max_antisymmetry =
                row.max_antisymmetry.max(by_comm.antisymmetry_residual()).max(by_torque.antisymmetry_residual());
        }
        rows.push(row);
    }
    let two_level_literal = two_level_literal_check(20, &mut rng)?;
    Ok(VerifyReport { seed, rows, two_level_literal })
}
