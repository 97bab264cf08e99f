//! su(N) generators, structure constants and the adjoint representation.
//!
//! Generators follow the normalisation `Tr(G_α G_β) = 2δ_αβ` and close as
//! `[G_α, G_β] = 2i Σ_γ f_αβγ G_γ`.

use std::collections::BTreeMap;

use crate::{tol, CMatrix, Error, RMatrix, Result, C64};

/// Square complex matrix equal to its own conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates squareness and Hermiticity to [`tol::HERMITIAN`].
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "operator must be a non-empty square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let residual = hermiticity_residual(&matrix);
        if residual > tol::HERMITIAN {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self(matrix))
    }

    /// Builds the Hermitian part `(A + A†)/2` of an arbitrary square matrix.
    pub fn hermitize(matrix: &CMatrix) -> Self {
        Self((matrix + matrix.adjoint()).scale(0.5))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }
}

/// Largest entrywise deviation `|A − A†|`.
pub fn hermiticity_residual(matrix: &CMatrix) -> f64 {
    let n = matrix.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `Tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Worst violations of the generator-set invariants.
#[derive(Clone, Copy, Debug, Default)]
pub struct GeneratorAudit {
    pub max_trace: f64,
    pub max_orthonormality: f64,
    pub max_hermiticity: f64,
}

impl GeneratorAudit {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_trace < tol && self.max_orthonormality < tol && self.max_hermiticity < tol
    }
}

/// Ordered basis of N²−1 traceless Hermitian generators of su(N).
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    dim: usize,
    generators: Vec<HermitianMatrix>,
}

impl GeneratorSet {
    /// Generalised Gell-Mann basis.
    ///
    /// For each level `k = 1..N−1` the symmetric/antisymmetric pairs
    /// `(j, k), j < k` are emitted in turn, followed by the diagonal generator
    /// of level `k`. For N = 2 this gives the Pauli matrices `σx, σy, σz`; for
    /// N = 3 it gives the usual `λ1..λ8`.
    pub fn build(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("su(N) needs N >= 2, got {n}")));
        }
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let mut generators = Vec::with_capacity(n * n - 1);
        for k in 1..n {
            for j in 0..k {
                let mut sym = CMatrix::zeros(n, n);
                sym[(j, k)] = one;
                sym[(k, j)] = one;
                generators.push(HermitianMatrix(sym));

                let mut anti = CMatrix::zeros(n, n);
                anti[(j, k)] = -i;
                anti[(k, j)] = i;
                generators.push(HermitianMatrix(anti));
            }
            let l = k as f64;
            let norm = (2.0 / (l * (l + 1.0))).sqrt();
            let mut diag = CMatrix::zeros(n, n);
            for j in 0..k {
                diag[(j, j)] = C64::new(norm, 0.0);
            }
            diag[(k, k)] = C64::new(-l * norm, 0.0);
            generators.push(HermitianMatrix(diag));
        }
        Ok(Self { dim: n, generators })
    }

    /// Wraps an arbitrary list of matrices, checking every invariant.
    pub fn from_matrices(dim: usize, matrices: Vec<CMatrix>) -> Result<Self> {
        if dim < 2 || matrices.len() != dim * dim - 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} generators of dimension {dim}, got {}",
                (dim * dim).saturating_sub(1),
                matrices.len()
            )));
        }
        let generators = matrices
            .into_iter()
            .map(|m| {
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: m.nrows() });
                }
                HermitianMatrix::new(m)
            })
            .collect::<Result<Vec<_>>>()?;
        let set = Self { dim, generators };
        let audit = set.audit();
        if !audit.passes(tol::GENERATOR) {
            return Err(Error::InvalidInput(format!("generator set violates invariants: {audit:?}")));
        }
        Ok(set)
    }

    /// Hilbert-space dimension N.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of generators, N²−1.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&HermitianMatrix> {
        self.generators.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CMatrix> {
        self.generators.iter().map(HermitianMatrix::matrix)
    }

    pub fn audit(&self) -> GeneratorAudit {
        let mut audit = GeneratorAudit::default();
        for (a, ga) in self.iter().enumerate() {
            audit.max_trace = audit.max_trace.max(ga.trace().norm());
            audit.max_hermiticity = audit.max_hermiticity.max(hermiticity_residual(ga));
            for (b, gb) in self.iter().enumerate().skip(a) {
                let expected = if a == b { 2.0 } else { 0.0 };
                let dev = (trace_product(ga, gb) - C64::new(expected, 0.0)).norm();
                audit.max_orthonormality = audit.max_orthonormality.max(dev);
            }
        }
        audit
    }
}

impl std::ops::Index<usize> for GeneratorSet {
    type Output = CMatrix;

    fn index(&self, index: usize) -> &CMatrix {
        self.generators[index].matrix()
    }
}

/// Fully antisymmetric structure constants `f_αβγ`, stored on sorted triples.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureTensor {
    dim: usize,
    entries: BTreeMap<(usize, usize, usize), f64>,
}

// Values below this are treated as structural zeros.
const STRUCTURAL_ZERO: f64 = 1e-14;

/// Sorts a triple of distinct indices, returning the permutation sign.
fn sort_triple(a: usize, b: usize, c: usize) -> ((usize, usize, usize), f64) {
    let mut idx = [a, b, c];
    let mut sign = 1.0;
    for i in 0..2 {
        for j in 0..2 - i {
            if idx[j] > idx[j + 1] {
                idx.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    ((idx[0], idx[1], idx[2]), sign)
}

impl StructureTensor {
    /// Builds a tensor from values on sorted triples `a < b < c`.
    pub fn from_sorted(dim: usize, values: impl IntoIterator<Item = ((usize, usize, usize), f64)>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for ((a, b, c), v) in values {
            if !(a < b && b < c && c < dim) {
                return Err(Error::InvalidInput(format!("triple ({a},{b},{c}) is not sorted or in range")));
            }
            if v.abs() > STRUCTURAL_ZERO {
                entries.insert((a, b, c), v);
            }
        }
        Ok(Self { dim, entries })
    }

    /// Number of generators the tensor indexes.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (sorted, non-zero) triples.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        if a == b || b == c || a == c {
            return 0.0;
        }
        let (key, sign) = sort_triple(a, b, c);
        self.entries.get(&key).map_or(0.0, |v| sign * v)
    }

    /// Non-zero sorted triples.
    pub fn sorted_entries(&self) -> impl Iterator<Item = ((usize, usize, usize), f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    /// Every non-zero `(α, β, γ, f_αβγ)`, all six orderings of each triple.
    pub fn all_entries(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.entries.iter().flat_map(|(&(a, b, c), &v)| {
            [(a, b, c, v), (b, c, a, v), (c, a, b, v), (b, a, c, -v), (a, c, b, -v), (c, b, a, -v)]
        })
    }

    /// Dense copy indexed `[α][β][γ]` as `α·d² + β·d + γ`.
    pub fn dense(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d * d];
        for (a, b, c, v) in self.all_entries() {
            out[a * d * d + b * d + c] = v;
        }
        out
    }

    /// Max over `(α,β,γ,ν)` of the Jacobi sum
    /// `Σ_μ f_αβμ f_μγν + f_βγμ f_μαν + f_γαμ f_μβν`.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim;
        let f = self.dense();
        let at = |a: usize, b: usize, c: usize| f[a * d * d + b * d + c];
        let mut worst = 0.0_f64;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for nu in 0..d {
                        let mut s = 0.0;
                        for mu in 0..d {
                            s += at(a, b, mu) * at(mu, c, nu)
                                + at(b, c, mu) * at(mu, a, nu)
                                + at(c, a, mu) * at(mu, b, nu);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}

/// `f_αβγ = Tr([G_α, G_β] G_γ) / (4i)` over all sorted triples.
///
/// Fails with [`Error::ImaginaryResidue`] if any value is not real, which only
/// happens for a malformed generator set.
pub fn structure_constants(gens: &GeneratorSet) -> Result<StructureTensor> {
    let d = gens.len();
    let denom = C64::new(0.0, 4.0);
    let mut values = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            let comm = commutator(&gens[a], &gens[b]);
            for c in b + 1..d {
                let f = trace_product(&comm, &gens[c]) / denom;
                if f.im.abs() > tol::IMAG_RESIDUE {
                    return Err(Error::ImaginaryResidue { what: "structure constant", residue: f.im.abs() });
                }
                values.push(((a, b, c), f.re));
            }
        }
    }
    StructureTensor::from_sorted(d, values)
}

/// Max entrywise `|[G_α, G_β] − 2i Σ_γ f_αβγ G_γ|` over all pairs.
pub fn reconstruction_residual(gens: &GeneratorSet, f: &StructureTensor) -> f64 {
    let d = gens.len();
    let n = gens.dim();
    let mut worst = 0.0_f64;
    for a in 0..d {
        for b in 0..d {
            let mut rebuilt = CMatrix::zeros(n, n);
            for c in 0..d {
                let v = f.get(a, b, c);
                if v != 0.0 {
                    rebuilt += &gens[c] * C64::new(0.0, 2.0 * v);
                }
            }
            let diff = commutator(&gens[a], &gens[b]) - rebuilt;
            worst = diff.iter().fold(worst, |w, z| w.max(z.norm()));
        }
    }
    worst
}

/// Adjoint-representation matrix `(𝓕_α)_βγ = −i f_αβγ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointMatrix {
    pub index: usize,
    pub matrix: CMatrix,
}

impl AdjointMatrix {
    /// Real antisymmetric `R_α` with `𝓕_α = i R_α`, i.e. `(R_α)_βγ = −f_αβγ`.
    pub fn real_form(&self) -> RMatrix {
        self.matrix.map(|z| z.im)
    }
}

pub fn adjoint_rep(f: &StructureTensor, alpha: usize) -> Result<AdjointMatrix> {
    let d = f.dim();
    if alpha >= d {
        return Err(Error::IndexOutOfRange { index: alpha, len: d });
    }
    let matrix = CMatrix::from_fn(d, d, |b, c| C64::new(0.0, -f.get(alpha, b, c)));
    Ok(AdjointMatrix { index: alpha, matrix })
}

/// Max entrywise `|[𝓕_α, 𝓕_β] − i Σ_γ f_αβγ 𝓕_γ|`.
///
/// The adjoint matrices close with a factor `i`, half the `2i` of the defining
/// generators, because `G_α/2` rather than `G_α` carries the standard
/// `[T_α, T_β] = i f_αβγ T_γ` normalisation.
pub fn adjoint_commutator_residual(f: &StructureTensor) -> Result<f64> {
    let d = f.dim();
    let adj = (0..d).map(|a| adjoint_rep(f, a).map(|m| m.matrix)).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0_f64;
    for a in 0..d {
        for b in a + 1..d {
            let mut rhs = CMatrix::zeros(d, d);
            for (c, m) in adj.iter().enumerate() {
                let v = f.get(a, b, c);
                if v != 0.0 {
                    rhs += m * C64::new(0.0, v);
                }
            }
            let diff = commutator(&adj[a], &adj[b]) - rhs;
            worst = diff.iter().fold(worst, |w, z| w.max(z.norm()));
        }
    }
    Ok(worst)
}
