//! Time propagation: Liouville oracle, coherence-vector RK4 and the
//! exponential propagator for self-commuting families.

use crate::algebra::{commutator, hermiticity_residual, GeneratorSet, HermitianMatrix};
use crate::coherence::{rho_to_coherence, CoherenceVector, DensityMatrix, EomMatrix};
use crate::expm::expm;
use crate::pulse::TimeGrid;
use crate::{tol, CMatrix, Error, RMatrix, Result, C64};

/// Per-step audit values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Audit {
    /// `|v|²`.
    pub norm_sq: f64,
    /// `Tr ρ`, when ρ is tracked.
    pub trace: Option<f64>,
    /// `Tr ρ²`, when ρ is tracked.
    pub purity: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<CoherenceVector>,
    pub audits: Vec<Audit>,
    /// Density matrices, only for the Liouville propagator.
    pub rhos: Option<Vec<DensityMatrix>>,
}

impl Trajectory {
    pub fn from_states(grid: TimeGrid, states: Vec<CoherenceVector>) -> Self {
        let audits = states.iter().map(|v| Audit { norm_sq: v.norm_sq(), trace: None, purity: None }).collect();
        Self { grid, states, audits, rhos: None }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &CoherenceVector {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// Max over time of `| |v(t)|² − |v(0)|² |`.
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.audits[0].norm_sq;
        self.audits.iter().map(|a| (a.norm_sq - n0).abs()).fold(0.0, f64::max)
    }

    /// Max over time of `|Tr ρ − 1|` and of `|Tr ρ²(t) − Tr ρ²(0)|`.
    pub fn density_drifts(&self) -> Option<(f64, f64)> {
        let p0 = self.audits[0].purity?;
        let mut trace = 0.0_f64;
        let mut purity = 0.0_f64;
        for a in &self.audits {
            trace = trace.max((a.trace? - 1.0).abs());
            purity = purity.max((a.purity? - p0).abs());
        }
        Some((trace, purity))
    }

    /// Max componentwise deviation from another trajectory on the same grid.
    pub fn max_deviation(&self, other: &Trajectory) -> f64 {
        assert_eq!(self.len(), other.len(), "trajectories must share a grid");
        self.states.iter().zip(&other.states).map(|(a, b)| (&a.0 - &b.0).amax()).fold(0.0, f64::max)
    }

    /// Applies a fixed linear map to every state (e.g. a frame rotation).
    pub fn mapped(&self, r: &RMatrix) -> Trajectory {
        let states = self.states.iter().map(|v| CoherenceVector(r * &v.0)).collect();
        let mut out = Trajectory::from_states(self.grid, states);
        if let Some(rhos) = &self.rhos {
            for (a, rho) in out.audits.iter_mut().zip(rhos) {
                a.trace = Some(rho.trace());
                a.purity = Some(rho.purity());
            }
        }
        out
    }
}

fn liouville_rhs(h: &HermitianMatrix, rho: &CMatrix) -> CMatrix {
    commutator(h.matrix(), rho) * C64::new(0.0, -1.0)
}

/// RK4 integration of `i dρ/dt = [H(t), ρ]`, reported as coherence vectors.
pub fn propagate_liouville<H>(
    rho0: &DensityMatrix,
    h_of_t: H,
    gens: &GeneratorSet,
    grid: &TimeGrid,
) -> Result<Trajectory>
where
    H: Fn(f64) -> HermitianMatrix,
{
    grid.validate()?;
    let audit = rho0.validate();
    if !audit.is_valid() {
        return Err(Error::InvalidInput(format!("initial density matrix is not valid: {audit:?}")));
    }
    let h = grid.dt();
    let mut rho = rho0.matrix().clone();
    let mut rhos = Vec::with_capacity(grid.len());
    rhos.push(rho0.clone());
    for k in 0..grid.n_steps {
        let t = grid.time(k);
        let h0 = h_of_t(t);
        if h0.dim() != rho.nrows() {
            return Err(Error::DimensionMismatch { expected: rho.nrows(), got: h0.dim() });
        }
        let hm = h_of_t(t + 0.5 * h);
        let h1 = h_of_t(t + h);
        let k1 = liouville_rhs(&h0, &rho);
        let k2 = liouville_rhs(&hm, &(&rho + &k1 * C64::new(0.5 * h, 0.0)));
        let k3 = liouville_rhs(&hm, &(&rho + &k2 * C64::new(0.5 * h, 0.0)));
        let k4 = liouville_rhs(&h1, &(&rho + &k3 * C64::new(h, 0.0)));
        rho += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);

        let abort = |reason: String| Error::NumericalAbort { step: k + 1, time: grid.time(k + 1), reason };
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(abort("non-finite density matrix".into()));
        }
        let residue = hermiticity_residual(&rho);
        if residue > tol::HERMITIZATION {
            return Err(abort(format!("Hermiticity residue {residue:e}")));
        }
        rho = (&rho + rho.adjoint()).scale(0.5);
        let drift = (rho.trace().re - 1.0).abs();
        if drift > tol::TRACE_DRIFT {
            return Err(abort(format!("trace drift {drift:e}; reduce the step size")));
        }
        rhos.push(DensityMatrix::from_matrix_unchecked(rho.clone()));
    }
    let states = rhos.iter().map(|r| rho_to_coherence(r, gens)).collect::<Result<Vec<_>>>()?;
    let mut traj = Trajectory::from_states(*grid, states);
    for (a, r) in traj.audits.iter_mut().zip(&rhos) {
        a.trace = Some(r.trace());
        a.purity = Some(r.purity());
    }
    traj.rhos = Some(rhos);
    Ok(traj)
}

/// Classic RK4 on `dv/dt = g(t) v`.
pub fn propagate_coherence_rk4<G>(v0: &CoherenceVector, g_of_t: G, grid: &TimeGrid) -> Result<Trajectory>
where
    G: Fn(f64) -> EomMatrix,
{
    grid.validate()?;
    let h = grid.dt();
    let mut v = v0.0.clone();
    let mut states = Vec::with_capacity(grid.len());
    states.push(v0.clone());
    for k in 0..grid.n_steps {
        let t = grid.time(k);
        let g0 = g_of_t(t).matrix;
        if g0.nrows() != v.len() {
            return Err(Error::DimensionMismatch { expected: v.len(), got: g0.nrows() });
        }
        let gm = g_of_t(t + 0.5 * h).matrix;
        let g1 = g_of_t(t + h).matrix;
        let k1 = &g0 * &v;
        let k2 = &gm * (&v + &k1 * (0.5 * h));
        let k3 = &gm * (&v + &k2 * (0.5 * h));
        let k4 = &g1 * (&v + &k3 * h);
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericalAbort {
                step: k + 1,
                time: grid.time(k + 1),
                reason: "non-finite coherence vector".into(),
            });
        }
        states.push(CoherenceVector(v.clone()));
    }
    Ok(Trajectory::from_states(*grid, states))
}

const COMMUTING_SAMPLES: usize = 16;

/// Max `|[g(t_i), g(t_j)]|` over pairs drawn from a coarse sub-grid.
pub fn commuting_residual<G>(g_of_t: G, grid: &TimeGrid) -> f64
where
    G: Fn(f64) -> EomMatrix,
{
    let samples: Vec<RMatrix> = grid
        .sample_times(COMMUTING_SAMPLES.max(tol::MIN_COMMUTING_SAMPLES))
        .into_iter()
        .map(|t| g_of_t(t).matrix)
        .collect();
    let mut worst = 0.0_f64;
    for (i, a) in samples.iter().enumerate() {
        for b in &samples[i + 1..] {
            worst = worst.max((a * b - b * a).amax());
        }
    }
    worst
}

/// True when `g(t)` commutes with itself at all sampled time pairs.
pub fn check_commuting_family<G>(g_of_t: G, grid: &TimeGrid) -> bool
where
    G: Fn(f64) -> EomMatrix,
{
    commuting_residual(g_of_t, grid) < tol::COMMUTING
}

/// `∫_{t0}^{t_k} f dt` at every grid point, Simpson's rule on each step using
/// the step midpoint.
pub fn cumulative_simpson<F>(f: F, grid: &TimeGrid) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    let h = grid.dt();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    out.push(0.0);
    let mut left = f(grid.time(0));
    for k in 0..grid.n_steps {
        let t = grid.time(k);
        let right = f(grid.time(k + 1));
        acc += h / 6.0 * (left + 4.0 * f(t + 0.5 * h) + right);
        out.push(acc);
        left = right;
    }
    out
}

/// `v(t) = exp(∫ g dt) v0`, valid only for self-commuting families.
pub fn magnus_propagate<G>(v0: &CoherenceVector, g_of_t: G, grid: &TimeGrid) -> Result<Trajectory>
where
    G: Fn(f64) -> EomMatrix,
{
    grid.validate()?;
    let residual = commuting_residual(&g_of_t, grid);
    if residual >= tol::COMMUTING {
        return Err(Error::NonCommuting { residual });
    }
    let h = grid.dt();
    let d = v0.len();
    let mut integral = RMatrix::zeros(d, d);
    let mut left = g_of_t(grid.time(0)).matrix;
    if left.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, got: left.nrows() });
    }
    let mut states = Vec::with_capacity(grid.len());
    states.push(v0.clone());
    for k in 0..grid.n_steps {
        let t = grid.time(k);
        let mid = g_of_t(t + 0.5 * h).matrix;
        let right = g_of_t(grid.time(k + 1)).matrix;
        integral += (&left + mid * 4.0 + &right) * (h / 6.0);
        states.push(CoherenceVector(expm(&integral) * &v0.0));
        left = right;
    }
    Ok(Trajectory::from_states(*grid, states))
}
