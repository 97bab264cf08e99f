//! Wei-Norman product-of-exponentials propagator for the SU(2) adjoint
//! dynamics.
//!
//! The coherence vector of a two-level system obeys `dv/dt = g v` with
//! `g = Σ Γ_α 𝓕_α` over the real rotation generators. Writing the propagator as
//!
//! ```text
//! M(t) = exp(Υ1 𝓕1) exp(Υ2 𝓕2) exp(Υ3 𝓕3)
//! ```
//!
//! turns `dM/dt M⁻¹ = g` into the nonlinear system `W(Υ1, Υ2) Υ̇ = Γ` with
//!
//! ```text
//!     | 1    0          sin Υ2         |
//! W = | 0    cos Υ1    −cos Υ2 sin Υ1  |     det W = cos Υ2
//!     | 0    sin Υ1     cos Υ2 cos Υ1  |
//! ```

use nalgebra::{Matrix3, Vector3};

use crate::coherence::CoherenceVector;
use crate::dynamics::Trajectory;
use crate::expm::expm;
use crate::pulse::TimeGrid;
use crate::{tol, Error, RMatrix, Result};

/// Real forms of the SU(2) adjoint generators: `𝓕_α` generates rotations
/// about axis α.
pub fn adjoint_rotation_generators() -> [Matrix3<f64>; 3] {
    #[rustfmt::skip]
    let gens = [
        Matrix3::new(
            0.0, 0.0, 0.0,
            0.0, 0.0, -1.0,
            0.0, 1.0, 0.0,
        ),
        Matrix3::new(
            0.0, 0.0, 1.0,
            0.0, 0.0, 0.0,
            -1.0, 0.0, 0.0,
        ),
        Matrix3::new(
            0.0, -1.0, 0.0,
            1.0, 0.0, 0.0,
            0.0, 0.0, 0.0,
        ),
    ];
    gens
}

/// `exp(θ 𝓕_axis)` in closed form.
pub fn rotation(axis: usize, theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    match axis {
        0 => Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
        1 => Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
        2 => Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
        _ => panic!("rotation axis must be 0, 1 or 2, got {axis}"),
    }
}

/// How [`bch_conjugate`] evaluates `e^A B e^{−A}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BchMode {
    /// Matrix exponentials.
    Exact,
    /// `B + [A,B] + [A,[A,B]]/2! + …` through the given number of nested
    /// commutators.
    Series(usize),
}

fn to_dynamic(m: &Matrix3<f64>) -> RMatrix {
    RMatrix::from_column_slice(3, 3, m.as_slice())
}

fn from_dynamic(m: &RMatrix) -> Matrix3<f64> {
    Matrix3::from_column_slice(m.as_slice())
}

pub fn bch_conjugate(a: &Matrix3<f64>, b: &Matrix3<f64>, mode: BchMode) -> Result<Matrix3<f64>> {
    match mode {
        BchMode::Exact => {
            let e = from_dynamic(&expm(&to_dynamic(a)));
            let e_inv = from_dynamic(&expm(&to_dynamic(&-a)));
            Ok(e * b * e_inv)
        }
        BchMode::Series(0) => Err(Error::InvalidInput("BCH series order must be at least 1".into())),
        BchMode::Series(order) => {
            let mut term = *b;
            let mut sum = *b;
            for k in 1..=order {
                term = (a * term - term * a) / k as f64;
                sum += term;
            }
            Ok(sum)
        }
    }
}

/// The matrix `W(Υ1, Υ2)` of the Wei-Norman parameter equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WMatrix {
    pub upsilon1: f64,
    pub upsilon2: f64,
}

impl WMatrix {
    pub fn new(upsilon1: f64, upsilon2: f64) -> Self {
        Self { upsilon1, upsilon2 }
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let (s1, c1) = self.upsilon1.sin_cos();
        let (s2, c2) = self.upsilon2.sin_cos();
        Matrix3::new(1.0, 0.0, s2, 0.0, c1, -c2 * s1, 0.0, s1, c1 * c2)
    }

    pub fn det(&self) -> f64 {
        self.upsilon2.cos()
    }

    /// Closed-form inverse; undefined where `cos Υ2 = 0`.
    pub fn inverse(&self) -> Matrix3<f64> {
        let (s1, c1) = self.upsilon1.sin_cos();
        let (s2, c2) = self.upsilon2.sin_cos();
        let t2 = s2 / c2;
        Matrix3::new(1.0, s1 * t2, -c1 * t2, 0.0, c1, s1, 0.0, -s1 / c2, c1 / c2)
    }
}

/// `Υ̇ = W(Υ)⁻¹ Γ`, failing when `|cos Υ2| ≤ floor`.
pub fn wn_rhs_with_floor(upsilon: &Vector3<f64>, torque: &Vector3<f64>, floor: f64) -> Result<Vector3<f64>> {
    let w = WMatrix::new(upsilon[0], upsilon[1]);
    let det = w.det();
    if det.abs() <= floor || !det.is_finite() {
        return Err(Error::Singularity { upsilon2: upsilon[1], cos_upsilon2: det.abs(), time: None });
    }
    let rate = w.inverse() * torque;
    let residual = (w.matrix() * rate - torque).amax();
    let scale = rate.amax().max(torque.amax()).max(1.0);
    if residual > tol::WN_RESUBSTITUTION * scale {
        return Err(Error::InvalidInput(format!("W resubstitution residual {residual:e} too large")));
    }
    Ok(rate)
}

/// [`wn_rhs_with_floor`] at the default singularity floor.
pub fn wn_rhs(upsilon: &Vector3<f64>, torque: &Vector3<f64>) -> Result<Vector3<f64>> {
    wn_rhs_with_floor(upsilon, torque, tol::WN_SINGULARITY_FLOOR)
}

/// Wei-Norman parameters sampled on a grid.
#[derive(Clone, Debug)]
pub struct WnParameters {
    pub grid: TimeGrid,
    pub upsilon: Vec<Vector3<f64>>,
    /// `Υ̇` at each grid point.
    pub rates: Vec<Vector3<f64>>,
    /// Max relative violation of `√(Υ̇2² + Υ̇3² cos²Υ2) = √(Γ2² + Γ3²)`.
    pub magnitude_residual: f64,
    /// Max violation of `Υ̇2 cos Υ1 − Υ̇3 cos Υ2 sin Υ1 = Γ2`, the relation that
    /// fixes `cot Υ1 = cos Υ2 Υ̇3 / Υ̇2` when `Γ2 = 0`.
    pub constraint_residual: f64,
    /// Smallest `|cos Υ2|` met on the grid.
    pub min_cos_upsilon2: f64,
}

/// RK4 on `W(Υ) Υ̇ = Γ(t)` from `Υ = 0`.
pub fn integrate_wn<T>(torque_of_t: T, grid: &TimeGrid, floor: f64) -> Result<WnParameters>
where
    T: Fn(f64) -> Vector3<f64>,
{
    grid.validate()?;
    let h = grid.dt();
    let rhs = |t: f64, u: &Vector3<f64>| {
        wn_rhs_with_floor(u, &torque_of_t(t), floor).map_err(|e| match e {
            Error::Singularity { upsilon2, cos_upsilon2, .. } => {
                Error::Singularity { upsilon2, cos_upsilon2, time: Some(t) }
            }
            other => other,
        })
    };

    let mut u = Vector3::zeros();
    let mut upsilon = Vec::with_capacity(grid.len());
    let mut rates = Vec::with_capacity(grid.len());
    let mut magnitude_residual = 0.0_f64;
    let mut constraint_residual = 0.0_f64;
    let mut min_cos_upsilon2 = f64::INFINITY;

    for k in 0..=grid.n_steps {
        let t = grid.time(k);
        let k1 = rhs(t, &u)?;

        let torque = torque_of_t(t);
        let c2 = u[1].cos();
        let (s1, c1) = u[0].sin_cos();
        let lhs = k1[1].hypot(k1[2] * c2);
        let expected = torque[1].hypot(torque[2]);
        magnitude_residual = magnitude_residual.max((lhs - expected).abs() / expected.max(1.0));
        constraint_residual = constraint_residual.max((k1[1] * c1 - k1[2] * c2 * s1 - torque[1]).abs());
        min_cos_upsilon2 = min_cos_upsilon2.min(c2.abs());
        upsilon.push(u);
        rates.push(k1);

        if k == grid.n_steps {
            break;
        }
        let k2 = rhs(t + 0.5 * h, &(u + k1 * (0.5 * h)))?;
        let k3 = rhs(t + 0.5 * h, &(u + k2 * (0.5 * h)))?;
        let k4 = rhs(t + h, &(u + k3 * h))?;
        u += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if !u.iter().all(|x| x.is_finite()) {
            return Err(Error::NumericalAbort {
                step: k + 1,
                time: grid.time(k + 1),
                reason: "non-finite Wei-Norman parameters".into(),
            });
        }
    }
    if magnitude_residual > tol::WN_MAGNITUDE_IDENTITY {
        return Err(Error::InvalidInput(format!("|Δ| identity violated by {magnitude_residual:e}")));
    }
    Ok(WnParameters { grid: *grid, upsilon, rates, magnitude_residual, constraint_residual, min_cos_upsilon2 })
}

/// `exp(Υ1 𝓕1) exp(Υ2 𝓕2) exp(Υ3 𝓕3)`.
pub fn m_from_upsilon(u: &Vector3<f64>) -> Matrix3<f64> {
    rotation(0, u[0]) * rotation(1, u[1]) * rotation(2, u[2])
}

pub fn reconstruct_m(params: &WnParameters) -> Vec<Matrix3<f64>> {
    params.upsilon.iter().map(m_from_upsilon).collect()
}

/// `v(t) = M(t) v(0)` for a three-component coherence vector.
pub fn wn_propagate<T>(v0: &CoherenceVector, torque_of_t: T, grid: &TimeGrid, floor: f64) -> Result<Trajectory>
where
    T: Fn(f64) -> Vector3<f64>,
{
    if v0.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: v0.len() });
    }
    let params = integrate_wn(torque_of_t, grid, floor)?;
    let v = Vector3::new(v0.0[0], v0.0[1], v0.0[2]);
    let states = reconstruct_m(&params)
        .iter()
        .map(|m| {
            let w = m * v;
            CoherenceVector::from_slice(&[w[0], w[1], w[2]])
        })
        .collect();
    Ok(Trajectory::from_states(*grid, states))
}
