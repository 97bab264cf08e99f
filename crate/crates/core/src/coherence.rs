//! Coherence/torque vectors and the equation-of-motion matrix.
//!
//! With `ρ = I/N + ½ Σ v_α G_α` and `H = c·I + ½ Σ Γ_α G_α`, the coherence
//! vector evolves as `dv/dt = g v`. The matrix `g` is built either from the
//! commutators `[H, G_α]` directly or by contracting the torque vector with the
//! structure constants; the two must agree.

use nalgebra::SymmetricEigen;

use crate::algebra::{commutator, trace_product, GeneratorSet, HermitianMatrix, StructureTensor};
use crate::{tol, CMatrix, Error, RMatrix, RVector, Result, C64};

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Violations found by [`DensityMatrix::validate`].
#[derive(Clone, Copy, Debug)]
pub struct DensityAudit {
    pub hermiticity: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl DensityAudit {
    pub fn is_valid(&self) -> bool {
        self.hermiticity <= tol::HERMITIAN && self.trace_error <= tol::TRACE && self.min_eigenvalue >= tol::POSITIVITY
    }
}

/// N×N density matrix.
///
/// [`DensityMatrix::new`] enforces Hermiticity, unit trace and positivity.
/// Matrices produced by [`coherence_to_rho`] skip the positivity check; use
/// [`DensityMatrix::validate`] to inspect them.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidInput("density matrix must be non-empty and square".into()));
        }
        let rho = Self(matrix);
        let audit = rho.validate();
        if !audit.is_valid() {
            return Err(Error::InvalidInput(format!("not a valid density matrix: {audit:?}")));
        }
        Ok(rho)
    }

    /// Pure state `|k⟩⟨k|`.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, len: dim });
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(Self(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim).unscale(dim as f64))
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self(matrix)
    }

    pub fn validate(&self) -> DensityAudit {
        let hermiticity = crate::algebra::hermiticity_residual(&self.0);
        let trace_error = (self.0.trace() - C64::new(1.0, 0.0)).norm();
        let herm = (&self.0 + self.0.adjoint()).scale(0.5);
        let min_eigenvalue = SymmetricEigen::new(herm).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        DensityAudit { hermiticity, trace_error, min_eigenvalue }
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        trace_product(&self.0, &self.0).re
    }
}

/// Real vector of generator expectation values `⟨G_α⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceVector(pub RVector);

impl CoherenceVector {
    pub fn zeros(len: usize) -> Self {
        Self(RVector::zeros(len))
    }

    pub fn from_slice(values: &[f64]) -> Self {
        Self(RVector::from_column_slice(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.norm_squared()
    }

    /// Largest `|v|²` a physical state can have: `2(N−1)/N`.
    pub fn max_norm_sq(levels: usize) -> f64 {
        2.0 * (levels as f64 - 1.0) / levels as f64
    }

    pub fn within_bound(&self, levels: usize) -> bool {
        self.norm_sq() <= Self::max_norm_sq(levels) + tol::NORM_BOUND
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }
}

/// Hamiltonian expansion coefficients `Γ_α = Tr(H G_α)` plus the identity part.
#[derive(Clone, Debug, PartialEq)]
pub struct TorqueVector {
    pub components: RVector,
    /// Coefficient of the identity, `Tr(H)/N`.
    pub trace_offset: f64,
}

impl TorqueVector {
    pub fn new(components: RVector, trace_offset: f64) -> Self {
        Self { components, trace_offset }
    }

    pub fn from_slice(components: &[f64]) -> Self {
        Self { components: RVector::from_column_slice(components), trace_offset: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Which construction produced an [`EomMatrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Commutator extraction from `[H, G_α]`.
    Commutator,
    /// Torque vector contracted with the structure constants.
    Torque,
}

/// Real antisymmetric matrix `g` in the column convention `dv/dt = g v`.
#[derive(Clone, Debug, PartialEq)]
pub struct EomMatrix {
    pub matrix: RMatrix,
    pub provenance: Provenance,
}

impl EomMatrix {
    pub fn new(matrix: RMatrix, provenance: Provenance) -> Self {
        Self { matrix, provenance }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Max `|g_αβ + g_βα|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        (&self.matrix + self.matrix.transpose()).amax()
    }

    pub fn apply(&self, v: &CoherenceVector) -> CoherenceVector {
        CoherenceVector(&self.matrix * &v.0)
    }
}

/// `v_α = Tr(ρ G_α)`.
pub fn rho_to_coherence(rho: &DensityMatrix, gens: &GeneratorSet) -> Result<CoherenceVector> {
    check_dim(gens.dim(), rho.dim())?;
    let mut v = RVector::zeros(gens.len());
    for (a, g) in gens.iter().enumerate() {
        let z = trace_product(rho.matrix(), g);
        if z.im.abs() > tol::IMAG_RESIDUE {
            return Err(Error::ImaginaryResidue { what: "coherence component", residue: z.im.abs() });
        }
        v[a] = z.re;
    }
    Ok(CoherenceVector(v))
}

/// `ρ = I/N + ½ Σ v_α G_α`. Positivity is not enforced.
pub fn coherence_to_rho(v: &CoherenceVector, gens: &GeneratorSet) -> Result<DensityMatrix> {
    check_dim(gens.len(), v.len())?;
    let n = gens.dim();
    let mut rho = CMatrix::identity(n, n).unscale(n as f64);
    for (g, &x) in gens.iter().zip(v.0.iter()) {
        rho += g * C64::new(0.5 * x, 0.0);
    }
    Ok(DensityMatrix::from_matrix_unchecked(rho))
}

/// `Γ_α = Tr(H G_α)`, `trace_offset = Tr(H)/N`.
pub fn hamiltonian_to_torque(h: &HermitianMatrix, gens: &GeneratorSet) -> Result<TorqueVector> {
    check_dim(gens.dim(), h.dim())?;
    let mut components = RVector::zeros(gens.len());
    for (a, g) in gens.iter().enumerate() {
        let z = trace_product(h.matrix(), g);
        if z.im.abs() > tol::IMAG_RESIDUE {
            return Err(Error::ImaginaryResidue { what: "torque component", residue: z.im.abs() });
        }
        components[a] = z.re;
    }
    let trace_offset = h.matrix().trace().re / h.dim() as f64;
    Ok(TorqueVector { components, trace_offset })
}

/// `H = c·I + ½ Σ Γ_α G_α`.
pub fn torque_to_hamiltonian(t: &TorqueVector, gens: &GeneratorSet) -> Result<HermitianMatrix> {
    check_dim(gens.len(), t.len())?;
    let n = gens.dim();
    let mut h = CMatrix::identity(n, n) * C64::new(t.trace_offset, 0.0);
    for (g, &x) in gens.iter().zip(t.components.iter()) {
        h += g * C64::new(0.5 * x, 0.0);
    }
    Ok(HermitianMatrix::hermitize(&h))
}

/// Raw commutator coefficients `g_βα` defined by `[H, G_α] = i Σ_β G_β g_βα`,
/// stored at `[β][α]`. These multiply the row vector: `dv_α/dt = −Σ_β v_β g_βα`.
pub fn commutator_coefficients(h: &HermitianMatrix, gens: &GeneratorSet) -> Result<RMatrix> {
    check_dim(gens.dim(), h.dim())?;
    let d = gens.len();
    let denom = C64::new(0.0, 2.0);
    let mut coeff = RMatrix::zeros(d, d);
    for alpha in 0..d {
        let comm = commutator(h.matrix(), &gens[alpha]);
        for beta in 0..d {
            let z = trace_product(&comm, &gens[beta]) / denom;
            if z.im.abs() > tol::IMAG_RESIDUE {
                return Err(Error::ImaginaryResidue { what: "commutator coefficient", residue: z.im.abs() });
            }
            coeff[(beta, alpha)] = z.re;
        }
    }
    Ok(coeff)
}

/// Equation-of-motion matrix from commutators, in the column convention.
///
/// The column matrix is the negative transpose of [`commutator_coefficients`], which
/// equals the coefficient matrix itself because it is antisymmetric.
pub fn eom_matrix_commutator(h: &HermitianMatrix, gens: &GeneratorSet) -> Result<EomMatrix> {
    let coeff = commutator_coefficients(h, gens)?;
    Ok(EomMatrix::new(-coeff.transpose(), Provenance::Commutator))
}

/// Equation-of-motion matrix `g_βα = Σ_γ Γ_γ f_γαβ`.
pub fn eom_matrix_torque(t: &TorqueVector, f: &StructureTensor) -> Result<EomMatrix> {
    check_dim(f.dim(), t.len())?;
    let d = f.dim();
    let mut g = RMatrix::zeros(d, d);
    for (gamma, alpha, beta, v) in f.all_entries() {
        g[(beta, alpha)] += t.components[gamma] * v;
    }
    Ok(EomMatrix::new(g, Provenance::Torque))
}

/// Max entrywise difference between the commutator and torque constructions.
pub fn route_agreement_residual(h: &HermitianMatrix, gens: &GeneratorSet, f: &StructureTensor) -> Result<f64> {
    let by_comm = eom_matrix_commutator(h, gens)?;
    let torque = hamiltonian_to_torque(h, gens)?;
    let by_torque = eom_matrix_torque(&torque, f)?;
    Ok((&by_comm.matrix - &by_torque.matrix).amax())
}
