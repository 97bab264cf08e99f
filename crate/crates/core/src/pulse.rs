//! Pulse envelopes, time grids and the two-level RWA drive.

use serde::Deserialize;

use crate::algebra::HermitianMatrix;
use crate::{CMatrix, Error, Result, C64};

/// Uniform time grid with `n_steps + 1` points.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_steps: usize) -> Result<Self> {
        let grid = Self { t_start, t_end, n_steps };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_end.is_finite()) || self.t_end <= self.t_start {
            return Err(Error::InvalidInput(format!(
                "time grid needs t_end > t_start, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidInput("time grid needs at least one step".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_end
        } else {
            self.t_start + k as f64 * self.dt()
        }
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_steps).map(|k| self.time(k))
    }

    /// `count` evenly spaced times spanning the grid, both ends included.
    pub fn sample_times(&self, count: usize) -> Vec<f64> {
        let count = count.max(2);
        let span = self.t_end - self.t_start;
        (0..count).map(|i| self.t_start + span * i as f64 / (count - 1) as f64).collect()
    }
}

/// Envelope shape `q(t)`, peak-normalised to 1.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    Constant,
    /// `exp(−(t−c)²/(2w²))`.
    Gaussian {
        center: f64,
        width: f64,
    },
    /// `sech((t−c)/w)`.
    Sech {
        center: f64,
        width: f64,
    },
    /// `cos²(π(t−c)/w)` on `|t−c| ≤ w/2`, zero outside.
    Sin2 {
        center: f64,
        width: f64,
    },
    /// Linear interpolation between `(t, q)` samples, held constant past the ends.
    Custom {
        samples: Vec<[f64; 2]>,
    },
}

impl Shape {
    /// Checks the shape parameters and rescales custom samples to peak 1.
    pub fn normalized(self) -> Result<Self> {
        self.validate()?;
        Ok(match self {
            Shape::Custom { samples } => {
                let peak = samples.iter().map(|s| s[1]).fold(0.0, f64::max);
                Shape::Custom { samples: samples.into_iter().map(|[t, q]| [t, q / peak]).collect() }
            }
            other => other,
        })
    }

    /// `q(t)`. Custom samples are used as given; see [`Shape::normalized`].
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Shape::Constant => 1.0,
            Shape::Gaussian { center, width } => {
                let x = (t - center) / width;
                (-0.5 * x * x).exp()
            }
            Shape::Sech { center, width } => 1.0 / ((t - center) / width).cosh(),
            Shape::Sin2 { center, width } => {
                let x = (t - center) / width;
                if x.abs() <= 0.5 {
                    (std::f64::consts::PI * x).cos().powi(2)
                } else {
                    0.0
                }
            }
            Shape::Custom { samples } => interpolate(samples, t),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Shape::Constant => Ok(()),
            Shape::Gaussian { center, width } | Shape::Sech { center, width } | Shape::Sin2 { center, width } => {
                if !(width.is_finite() && *width > 0.0 && center.is_finite()) {
                    return Err(Error::InvalidInput(format!("pulse width must be positive, got {width}")));
                }
                Ok(())
            }
            Shape::Custom { samples } => {
                if samples.len() < 2 {
                    return Err(Error::InvalidInput("custom envelope needs at least two samples".into()));
                }
                if samples.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(Error::InvalidInput("custom envelope times must be strictly increasing".into()));
                }
                if samples.iter().any(|s| !(s[1] >= 0.0 && s[1].is_finite())) {
                    return Err(Error::InvalidInput("custom envelope values must be finite and non-negative".into()));
                }
                if samples.iter().all(|s| s[1] == 0.0) {
                    return Err(Error::InvalidInput("custom envelope is identically zero".into()));
                }
                Ok(())
            }
        }
    }
}

fn interpolate(samples: &[[f64; 2]], t: f64) -> f64 {
    let first = samples[0];
    let last = samples[samples.len() - 1];
    if t <= first[0] {
        return first[1];
    }
    if t >= last[0] {
        return last[1];
    }
    let i = samples.partition_point(|s| s[0] <= t);
    let (a, b) = (samples[i - 1], samples[i]);
    a[1] + (b[1] - a[1]) * (t - a[0]) / (b[0] - a[0])
}

/// How the detuning follows the envelope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetuningMode {
    /// `Δ(t) = Δ₀`.
    Constant,
    /// `Δ(t) = Δ₀ q(t)`.
    Proportional,
}

/// Two-level RWA drive `Ω(t) = Ω₀ q(t)` with constant or proportional detuning.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseProfile {
    pub shape: Shape,
    pub omega0: f64,
    pub delta0: f64,
    pub detuning_mode: DetuningMode,
}

impl PulseProfile {
    pub fn new(shape: Shape, omega0: f64, delta0: f64, detuning_mode: DetuningMode) -> Result<Self> {
        let shape = shape.normalized()?;
        if !(omega0.is_finite() && delta0.is_finite()) {
            return Err(Error::InvalidInput("pulse amplitudes must be finite".into()));
        }
        Ok(Self { shape, omega0, delta0, detuning_mode })
    }

    pub fn envelope(&self, t: f64) -> f64 {
        self.shape.value(t)
    }

    pub fn omega(&self, t: f64) -> f64 {
        self.omega0 * self.envelope(t)
    }

    pub fn delta(&self, t: f64) -> f64 {
        match self.detuning_mode {
            DetuningMode::Constant => self.delta0,
            DetuningMode::Proportional => self.delta0 * self.envelope(t),
        }
    }

    /// `ε(t) = √(Ω² + Δ²)`.
    pub fn epsilon(&self, t: f64) -> f64 {
        self.omega(t).hypot(self.delta(t))
    }

    /// Peak value `ε₀ = √(Ω₀² + Δ₀²)`.
    pub fn epsilon0(&self) -> f64 {
        self.omega0.hypot(self.delta0)
    }

    /// Torque `(Ω, 0, −Δ)` over the Pauli generators.
    pub fn torque(&self, t: f64) -> [f64; 3] {
        [self.omega(t), 0.0, -self.delta(t)]
    }

    /// `H(t) = ½ [[0, Ω], [Ω, 2Δ]]`.
    pub fn hamiltonian(&self, t: f64) -> HermitianMatrix {
        let (o, d) = (self.omega(t), self.delta(t));
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(0.5 * o, 0.0), C64::new(0.5 * o, 0.0), C64::new(d, 0.0)],
        );
        HermitianMatrix::hermitize(&m)
    }

    /// Checks `q(t) ∈ [0, 1]` at every grid point.
    pub fn check_envelope(&self, grid: &TimeGrid) -> Result<()> {
        for t in grid.times() {
            let q = self.envelope(t);
            if !(0.0..=1.0 + 1e-15).contains(&q) {
                return Err(Error::InvalidInput(format!("envelope q({t}) = {q} outside [0, 1]")));
            }
        }
        Ok(())
    }
}
