//! Frame rotations, block structure of `g(t)` and conserved subspace norms.
//!
//! For a two-level drive whose detuning follows the Rabi envelope, rotating the
//! Pauli generators into
//!
//! ```text
//! F1 = (Ω/ε) G1 − (Δ/ε) G3,   F2 = G2,   F3 = (Δ/ε) G1 + (Ω/ε) G3
//! ```
//!
//! leaves a torque `(ε, 0, 0)`. The equation of motion then splits into the
//! blocks `{F1}` and `{F2, F3}`, each with a conserved squared length.

use crate::algebra::{GeneratorSet, StructureTensor};
use crate::coherence::{CoherenceVector, EomMatrix};
use crate::dynamics::{cumulative_simpson, Trajectory};
use crate::pulse::{DetuningMode, PulseProfile, TimeGrid};
use crate::{tol, CMatrix, Error, RMatrix, Result, C64};

/// Orthogonal change of generator basis, `F_α = Σ_β R_αβ G_β` and
/// `v_F = R v_G`.
#[derive(Clone, Debug)]
pub struct FrameTransform {
    pub matrix: RMatrix,
    pub generators: GeneratorSet,
}

impl FrameTransform {
    /// Rotates `gens` by `matrix`, which must be orthogonal.
    pub fn new(matrix: RMatrix, gens: &GeneratorSet) -> Result<Self> {
        let d = gens.len();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: matrix.nrows() });
        }
        let residual = orthogonality_residual(&matrix);
        if residual > tol::GENERATOR {
            return Err(Error::InvalidInput(format!("frame matrix is not orthogonal (residual {residual:e})")));
        }
        let rotated = (0..d)
            .map(|a| {
                let mut m = CMatrix::zeros(gens.dim(), gens.dim());
                for (b, g) in gens.iter().enumerate() {
                    m += g * C64::new(matrix[(a, b)], 0.0);
                }
                m
            })
            .collect();
        let generators = GeneratorSet::from_matrices(gens.dim(), rotated)?;
        Ok(Self { matrix, generators })
    }

    pub fn identity(gens: &GeneratorSet) -> Self {
        Self { matrix: RMatrix::identity(gens.len(), gens.len()), generators: gens.clone() }
    }

    pub fn apply(&self, v: &CoherenceVector) -> CoherenceVector {
        CoherenceVector(&self.matrix * &v.0)
    }

    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.matrix)
    }
}

fn orthogonality_residual(r: &RMatrix) -> f64 {
    (r * r.transpose() - RMatrix::identity(r.nrows(), r.nrows())).amax()
}

/// Rotation to the frame in which the proportional-detuning two-level torque is
/// `(ε, 0, 0)`.
pub fn build_f_frame(omega0: f64, delta0: f64) -> Result<FrameTransform> {
    let eps0 = omega0.hypot(delta0);
    if eps0 == 0.0 || !eps0.is_finite() {
        return Err(Error::InvalidInput("F frame needs a non-zero, finite field or detuning".into()));
    }
    let (c, s) = (omega0 / eps0, delta0 / eps0);
    #[rustfmt::skip]
    let r = RMatrix::from_row_slice(3, 3, &[
        c,   0.0, -s,
        0.0, 1.0, 0.0,
        s,   0.0, c,
    ]);
    FrameTransform::new(r, &GeneratorSet::build(2)?)
}

/// `R g Rᵀ`.
pub fn transform_eom(g: &EomMatrix, frame: &FrameTransform) -> Result<EomMatrix> {
    if g.dim() != frame.matrix.nrows() {
        return Err(Error::DimensionMismatch { expected: frame.matrix.nrows(), got: g.dim() });
    }
    Ok(EomMatrix::new(&frame.matrix * &g.matrix * frame.matrix.transpose(), g.provenance))
}

/// Partition of the generator indices into dynamically decoupled blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// Sorted index sets, ordered by smallest member.
    pub blocks: Vec<Vec<usize>>,
}

impl BlockDecomposition {
    /// Squared length of `v` restricted to each block.
    pub fn norms(&self, v: &CoherenceVector) -> Vec<f64> {
        self.blocks.iter().map(|b| b.iter().map(|&i| v.0[i] * v.0[i]).sum()).collect()
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Connected components of the graph linking `α, β` whenever
/// `|g_αβ(t)| > tol::BLOCK_COUPLING` at some grid time.
pub fn detect_blocks<G>(g_of_t: G, grid: &TimeGrid) -> BlockDecomposition
where
    G: Fn(f64) -> EomMatrix,
{
    let mut pattern: Option<Vec<bool>> = None;
    let mut d = 0;
    for t in grid.times() {
        let g = g_of_t(t).matrix;
        d = g.nrows();
        let p = pattern.get_or_insert_with(|| vec![false; d * d]);
        for i in 0..d {
            for j in 0..d {
                if g[(i, j)].abs() > tol::BLOCK_COUPLING {
                    p[i * d + j] = true;
                }
            }
        }
    }
    let pattern = pattern.unwrap_or_default();
    let mut parent: Vec<usize> = (0..d).collect();
    for i in 0..d {
        for j in 0..d {
            if pattern[i * d + j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_to_block = vec![usize::MAX; d];
    for i in 0..d {
        let r = find(&mut parent, i);
        if root_to_block[r] == usize::MAX {
            root_to_block[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[root_to_block[r]].push(i);
    }
    BlockDecomposition { blocks }
}

/// Per block, the max over time of `|Σ v_α(t)² − Σ v_α(0)²|`.
pub fn audit_conserved_norms(traj: &Trajectory, blocks: &BlockDecomposition) -> Vec<f64> {
    let initial = blocks.norms(&traj.states[0]);
    let mut drift = vec![0.0_f64; initial.len()];
    for v in &traj.states {
        for ((d, n), n0) in drift.iter_mut().zip(blocks.norms(v)).zip(&initial) {
            *d = d.max((n - n0).abs());
        }
    }
    drift
}

/// Ground-state solution in the F frame,
/// `F(t) = (−Δ₀/ε₀, −Ω₀ sin ε′/ε₀, Ω₀ cos ε′/ε₀)` with `ε′ = ∫ ε dt`.
pub fn closed_form_f_solution(pulse: &PulseProfile, grid: &TimeGrid) -> Result<Trajectory> {
    if pulse.detuning_mode != DetuningMode::Proportional {
        return Err(Error::InvalidInput("closed-form F solution needs proportional detuning".into()));
    }
    grid.validate()?;
    let eps0 = pulse.epsilon0();
    if eps0 == 0.0 {
        return Err(Error::InvalidInput("closed-form F solution needs a non-zero field or detuning".into()));
    }
    let rotation = cumulative_simpson(|t| eps0 * pulse.envelope(t), grid);
    let states = rotation
        .into_iter()
        .map(|e| {
            CoherenceVector::from_slice(&[
                -pulse.delta0 / eps0,
                -pulse.omega0 * e.sin() / eps0,
                pulse.omega0 * e.cos() / eps0,
            ])
        })
        .collect();
    Ok(Trajectory::from_states(*grid, states))
}

/// Structure constants of a rotated generator set.
pub fn frame_structure_constants(frame: &FrameTransform) -> Result<StructureTensor> {
    crate::algebra::structure_constants(&frame.generators)
}
