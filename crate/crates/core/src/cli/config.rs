//! TOML run configuration.
//!
//! ```toml
//! n_levels = 2
//! methods = ["rk4", "magnus", "closedform"]
//!
//! [grid]
//! t_start = 0.0
//! t_end = 10.0
//! n_steps = 10000
//!
//! [hamiltonian]
//! kind = "two-level"
//! omega0 = 1.0
//! delta0 = 0.5
//! detuning_mode = "proportional"
//! shape = { kind = "gaussian", center = 5.0, width = 1.0 }
//!
//! [initial_state]
//! kind = "ground"
//!
//! [output]
//! dir = "out"
//! prefix = "gauss"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::pulse::{DetuningMode, Shape, TimeGrid};
use crate::{tol, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Liouville,
    Rk4,
    Magnus,
    Weinorman,
    Closedform,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Liouville => "liouville",
            Method::Rk4 => "rk4",
            Method::Magnus => "magnus",
            Method::Weinorman => "weinorman",
            Method::Closedform => "closedform",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn constant_shape() -> Shape {
    Shape::Constant
}

fn constant_mode() -> DetuningMode {
    DetuningMode::Constant
}

fn unit_scale() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    /// `H(t) = ½ [[0, Ω(t)], [Ω(t), 2Δ(t)]]`.
    TwoLevel {
        omega0: f64,
        delta0: f64,
        #[serde(default = "constant_mode")]
        detuning_mode: DetuningMode,
        #[serde(default = "constant_shape")]
        shape: Shape,
    },
    /// `H(t) = q(t) H₀` with explicit entries for `H₀`.
    Matrix {
        real: Vec<Vec<f64>>,
        #[serde(default)]
        imag: Option<Vec<Vec<f64>>>,
        #[serde(default = "constant_shape")]
        shape: Shape,
    },
    /// `H(t) = q(t) H₀` with a seeded random Hermitian `H₀`.
    Random {
        seed: u64,
        #[serde(default = "unit_scale")]
        scale: f64,
        #[serde(default = "constant_shape")]
        shape: Shape,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    /// `|0⟩⟨0|`.
    #[default]
    Ground,
    Coherence {
        values: Vec<f64>,
    },
    Density {
        real: Vec<Vec<f64>>,
        #[serde(default)]
        imag: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
}

fn default_dir() -> PathBuf {
    PathBuf::from("output")
}

fn default_prefix() -> String {
    "run".into()
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_prefix")]
    pub prefix: String,
    #[serde(default)]
    pub format: OutputFormat,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: default_dir(), prefix: default_prefix(), format: OutputFormat::Csv }
    }
}

fn default_floor() -> f64 {
    tol::WN_SINGULARITY_FLOOR
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_levels: usize,
    pub methods: Vec<Method>,
    pub grid: TimeGrid,
    pub hamiltonian: HamiltonianSpec,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub output: OutputSpec,
    /// Floor on `|cos Υ2|` for the Wei-Norman method.
    #[serde(default = "default_floor")]
    pub singularity_floor: f64,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_square(name: &str, rows: &[Vec<f64>], n: usize) -> Result<()> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(config_err(format!("{name} must be a {n}x{n} array")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| config_err(format!("config parse error: {}", e.message())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_levels;
        if n < 2 {
            return Err(config_err(format!("n_levels must be at least 2, got {n}")));
        }
        if self.methods.is_empty() {
            return Err(config_err("methods must not be empty"));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(config_err("methods must not repeat"));
        }
        self.grid.validate().map_err(|e| config_err(e.to_string()))?;
        if !(self.singularity_floor > 0.0 && self.singularity_floor < 1.0) {
            return Err(config_err("singularity_floor must lie in (0, 1)"));
        }

        let two_level = match &self.hamiltonian {
            HamiltonianSpec::TwoLevel { detuning_mode, .. } => {
                if n != 2 {
                    return Err(config_err("a two-level Hamiltonian needs n_levels = 2"));
                }
                Some(*detuning_mode)
            }
            HamiltonianSpec::Matrix { real, imag, .. } => {
                check_square("hamiltonian.real", real, n)?;
                if let Some(im) = imag {
                    check_square("hamiltonian.imag", im, n)?;
                }
                None
            }
            HamiltonianSpec::Random { scale, .. } => {
                if !scale.is_finite() {
                    return Err(config_err("hamiltonian.scale must be finite"));
                }
                None
            }
        };

        match &self.initial_state {
            InitialState::Ground => {}
            InitialState::Coherence { values } => {
                if values.len() != n * n - 1 {
                    return Err(config_err(format!(
                        "initial coherence vector needs {} entries, got {}",
                        n * n - 1,
                        values.len()
                    )));
                }
            }
            InitialState::Density { real, imag } => {
                check_square("initial_state.real", real, n)?;
                if let Some(im) = imag {
                    check_square("initial_state.imag", im, n)?;
                }
            }
        }

        for m in &self.methods {
            match m {
                Method::Weinorman if n != 2 => {
                    return Err(config_err("weinorman needs a two-level system"));
                }
                Method::Closedform => {
                    if two_level != Some(DetuningMode::Proportional) {
                        return Err(config_err("closedform needs a two-level Hamiltonian with proportional detuning"));
                    }
                    if self.initial_state != InitialState::Ground {
                        return Err(config_err("closedform needs the ground initial state"));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}
