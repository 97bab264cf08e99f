//! Executes a [`RunConfig`] and writes trajectory CSVs plus a summary.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{HamiltonianSpec, InitialState, Method, RunConfig};
use super::verify::random_hermitian;
use crate::algebra::{structure_constants, GeneratorSet, HermitianMatrix, StructureTensor};
use crate::coherence::{
    coherence_to_rho, eom_matrix_torque, hamiltonian_to_torque, rho_to_coherence, CoherenceVector, DensityMatrix,
    EomMatrix, TorqueVector,
};
use crate::constants::{audit_conserved_norms, build_f_frame, closed_form_f_solution, detect_blocks, transform_eom};
use crate::constants::{BlockDecomposition, FrameTransform};
use crate::dynamics::{commuting_residual, magnus_propagate, propagate_coherence_rk4, propagate_liouville, Trajectory};
use crate::pulse::{DetuningMode, PulseProfile, Shape, TimeGrid};
use crate::wei_norman::wn_propagate;
use crate::{tol, CMatrix, Error, Result, C64};

/// Environment variable that overrides `output.dir`.
pub const OUTPUT_DIR_ENV: &str = "SUNDYN_OUTPUT_DIR";

enum Drive {
    TwoLevel(PulseProfile),
    Scaled { h0: HermitianMatrix, shape: Shape },
}

/// A configured system: generators, structure constants and `H(t)`.
pub struct System {
    pub gens: GeneratorSet,
    pub structure: StructureTensor,
    drive: Drive,
}

fn matrix_from_rows(real: &[Vec<f64>], imag: Option<&Vec<Vec<f64>>>) -> CMatrix {
    let n = real.len();
    CMatrix::from_fn(n, n, |i, j| C64::new(real[i][j], imag.map_or(0.0, |im| im[i][j])))
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl System {
    pub fn from_config(config: &RunConfig) -> Result<Self> {
        let gens = GeneratorSet::build(config.n_levels)?;
        let structure = structure_constants(&gens)?;
        let drive = match &config.hamiltonian {
            HamiltonianSpec::TwoLevel { omega0, delta0, detuning_mode, shape } => {
                Drive::TwoLevel(PulseProfile::new(shape.clone(), *omega0, *delta0, *detuning_mode).map_err(as_config)?)
            }
            HamiltonianSpec::Matrix { real, imag, shape } => Drive::Scaled {
                h0: HermitianMatrix::new(matrix_from_rows(real, imag.as_ref())).map_err(as_config)?,
                shape: shape.clone().normalized().map_err(as_config)?,
            },
            HamiltonianSpec::Random { seed, scale, shape } => Drive::Scaled {
                h0: random_hermitian(config.n_levels, *scale, &mut ChaCha8Rng::seed_from_u64(*seed)),
                shape: shape.clone().normalized().map_err(as_config)?,
            },
        };
        Ok(Self { gens, structure, drive })
    }

    pub fn pulse(&self) -> Option<&PulseProfile> {
        match &self.drive {
            Drive::TwoLevel(p) => Some(p),
            Drive::Scaled { .. } => None,
        }
    }

    pub fn hamiltonian(&self, t: f64) -> HermitianMatrix {
        match &self.drive {
            Drive::TwoLevel(p) => p.hamiltonian(t),
            Drive::Scaled { h0, shape } => HermitianMatrix::hermitize(&(h0.matrix() * C64::new(shape.value(t), 0.0))),
        }
    }

    pub fn torque(&self, t: f64) -> TorqueVector {
        hamiltonian_to_torque(&self.hamiltonian(t), &self.gens).expect("generator set matches the Hamiltonian")
    }

    pub fn eom(&self, t: f64) -> EomMatrix {
        eom_matrix_torque(&self.torque(t), &self.structure).expect("torque matches the structure tensor")
    }

    /// Analysis frame: the F frame for proportional-detuning two-level drives,
    /// the identity otherwise.
    pub fn analysis_frame(&self) -> Result<(FrameTransform, &'static str)> {
        match self.pulse() {
            Some(p) if p.detuning_mode == DetuningMode::Proportional && p.epsilon0() > 0.0 => {
                Ok((build_f_frame(p.omega0, p.delta0)?, "F"))
            }
            _ => Ok((FrameTransform::identity(&self.gens), "identity")),
        }
    }
}

fn initial_state(config: &RunConfig, gens: &GeneratorSet) -> Result<(DensityMatrix, CoherenceVector)> {
    match &config.initial_state {
        InitialState::Ground => {
            let rho = DensityMatrix::basis_state(config.n_levels, 0)?;
            let v = rho_to_coherence(&rho, gens)?;
            Ok((rho, v))
        }
        InitialState::Coherence { values } => {
            let v = CoherenceVector::from_slice(values);
            let rho = coherence_to_rho(&v, gens)?;
            Ok((rho, v))
        }
        InitialState::Density { real, imag } => {
            let rho = DensityMatrix::new(matrix_from_rows(real, imag.as_ref())).map_err(as_config)?;
            let v = rho_to_coherence(&rho, gens)?;
            Ok((rho, v))
        }
    }
}

/// Conserved-quantity drifts of one method.
#[derive(Clone, Debug, Serialize)]
pub struct MethodDrift {
    pub method: String,
    pub norm_sq: f64,
    pub blocks: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub purity: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Deviation {
    pub a: String,
    pub b: String,
    pub max_abs: f64,
}

pub struct MethodOutput {
    pub method: Method,
    /// States in the generator frame.
    pub trajectory: Trajectory,
}

pub struct RunReport {
    pub n_levels: usize,
    pub grid: TimeGrid,
    pub outputs: Vec<MethodOutput>,
    pub frame: FrameTransform,
    pub frame_name: &'static str,
    pub blocks: BlockDecomposition,
    pub deviations: Vec<Deviation>,
    pub drifts: Vec<MethodDrift>,
}

impl RunReport {
    pub fn trajectory(&self, method: Method) -> Option<&Trajectory> {
        self.outputs.iter().find(|o| o.method == method).map(|o| &o.trajectory)
    }

    pub fn deviation(&self, a: Method, b: Method) -> Option<f64> {
        self.deviations
            .iter()
            .find(|d| (d.a == a.name() && d.b == b.name()) || (d.a == b.name() && d.b == a.name()))
            .map(|d| d.max_abs)
    }

    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().map(|d| d.max_abs).fold(0.0, f64::max)
    }
}

fn run_method(
    method: Method,
    config: &RunConfig,
    system: &System,
    frame: &FrameTransform,
    rho0: &DensityMatrix,
    v0: &CoherenceVector,
) -> Result<Trajectory> {
    let grid = &config.grid;
    match method {
        Method::Liouville => propagate_liouville(rho0, |t| system.hamiltonian(t), &system.gens, grid),
        Method::Rk4 => propagate_coherence_rk4(v0, |t| system.eom(t), grid),
        Method::Magnus => {
            let residual = commuting_residual(|t| system.eom(t), grid);
            if residual >= tol::COMMUTING {
                return Err(Error::Config(format!(
                    "magnus needs g(t) to commute with itself at all times (residual {residual:e})"
                )));
            }
            magnus_propagate(v0, |t| system.eom(t), grid)
        }
        Method::Weinorman => {
            let torque = |t: f64| {
                let c = system.torque(t).components;
                Vector3::new(c[0], c[1], c[2])
            };
            wn_propagate(v0, torque, grid, config.singularity_floor)
        }
        Method::Closedform => {
            let pulse = system.pulse().ok_or_else(|| Error::Config("closedform needs a two-level pulse".into()))?;
            let f_traj = closed_form_f_solution(pulse, grid).map_err(as_config)?;
            Ok(f_traj.mapped(&frame.matrix.transpose()))
        }
    }
}

/// Runs every configured method; no files are written.
pub fn execute(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let system = System::from_config(config)?;
    let (rho0, v0) = initial_state(config, &system.gens)?;
    let (frame, frame_name) = system.analysis_frame()?;
    let blocks =
        detect_blocks(|t| transform_eom(&system.eom(t), &frame).expect("frame matches generator count"), &config.grid);

    let results: Vec<Result<Trajectory>> = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .methods
            .iter()
            .map(|&m| {
                let (system, frame, rho0, v0) = (&system, &frame, &rho0, &v0);
                scope.spawn(move || run_method(m, config, system, frame, rho0, v0))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("propagation thread panicked")).collect()
    });
    let mut outputs = Vec::with_capacity(results.len());
    for (&method, result) in config.methods.iter().zip(results) {
        outputs.push(MethodOutput { method, trajectory: result? });
    }

    let mut deviations = Vec::new();
    for (i, a) in outputs.iter().enumerate() {
        for b in &outputs[i + 1..] {
            deviations.push(Deviation {
                a: a.method.name().into(),
                b: b.method.name().into(),
                max_abs: a.trajectory.max_deviation(&b.trajectory),
            });
        }
    }
    let drifts = outputs
        .iter()
        .map(|o| {
            let in_frame = o.trajectory.mapped(&frame.matrix);
            let (trace, purity) = match o.trajectory.density_drifts() {
                Some((t, p)) => (Some(t), Some(p)),
                None => (None, None),
            };
            MethodDrift {
                method: o.method.name().into(),
                norm_sq: o.trajectory.norm_drift(),
                blocks: audit_conserved_norms(&in_frame, &blocks),
                trace,
                purity,
            }
        })
        .collect();

    Ok(RunReport {
        n_levels: config.n_levels,
        grid: config.grid,
        outputs,
        frame,
        frame_name,
        blocks,
        deviations,
        drifts,
    })
}

/// Fixed 17-significant-digit decimal.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_trajectory(
    path: &Path,
    out: &MethodOutput,
    frame: &FrameTransform,
    blocks: &BlockDecomposition,
) -> Result<()> {
    let traj = &out.trajectory;
    let d = traj.states[0].len();
    let mut w = BufWriter::new(fs::File::create(path)?);
    let mut header = vec!["time".to_string()];
    header.extend((1..=d).map(|i| format!("v{i}")));
    header.push("norm_sq".into());
    header.extend((1..=blocks.blocks.len()).map(|i| format!("block{i}_norm_sq")));
    if traj.rhos.is_some() {
        header.push("trace_rho".into());
        header.push("purity".into());
    }
    writeln!(w, "{}", header.join(","))?;
    for (k, (t, v)) in traj.grid.times().zip(&traj.states).enumerate() {
        let mut row: Vec<String> = vec![fmt_value(t)];
        row.extend(v.as_slice().iter().map(|&x| fmt_value(x)));
        row.push(fmt_value(v.norm_sq()));
        row.extend(blocks.norms(&frame.apply(v)).into_iter().map(fmt_value));
        if traj.rhos.is_some() {
            let a = traj.audits[k];
            row.push(fmt_value(a.trace.unwrap_or(f64::NAN)));
            row.push(fmt_value(a.purity.unwrap_or(f64::NAN)));
        }
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct GridSummary {
    t_start: f64,
    t_end: f64,
    n_steps: usize,
}

#[derive(Serialize)]
struct Summary<'a> {
    n_levels: usize,
    methods: Vec<&'a str>,
    frame: &'a str,
    frame_matrix: Vec<Vec<f64>>,
    blocks: Vec<Vec<usize>>,
    max_pairwise_deviation: f64,
    grid: GridSummary,
    deviations: &'a [Deviation],
    drift: &'a [MethodDrift],
}

/// Writes `<prefix>_<method>.csv` per method and `<prefix>_summary.toml`.
pub fn write_outputs(report: &RunReport, dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for out in &report.outputs {
        let path = dir.join(format!("{prefix}_{}.csv", out.method.name()));
        write_trajectory(&path, out, &report.frame, &report.blocks)?;
        written.push(path);
    }
    let f = &report.frame.matrix;
    let summary = Summary {
        n_levels: report.n_levels,
        methods: report.outputs.iter().map(|o| o.method.name()).collect(),
        frame: report.frame_name,
        frame_matrix: (0..f.nrows()).map(|i| f.row(i).iter().copied().collect()).collect(),
        // one-based, matching the CSV column names
        blocks: report.blocks.blocks.iter().map(|b| b.iter().map(|i| i + 1).collect()).collect(),
        max_pairwise_deviation: report.max_deviation(),
        grid: GridSummary { t_start: report.grid.t_start, t_end: report.grid.t_end, n_steps: report.grid.n_steps },
        deviations: &report.deviations,
        drift: &report.drifts,
    };
    let text = toml::to_string(&summary).map_err(|e| Error::Config(format!("cannot serialise summary: {e}")))?;
    let path = dir.join(format!("{prefix}_summary.toml"));
    fs::write(&path, text)?;
    written.push(path);
    Ok(written)
}

/// Executes the run and writes its outputs. `dir_override` (usually from
/// [`OUTPUT_DIR_ENV`]) replaces `output.dir`.
pub fn run(config: &RunConfig, dir_override: Option<&Path>) -> Result<(RunReport, Vec<PathBuf>)> {
    let report = execute(config)?;
    let dir = dir_override.unwrap_or(&config.output.dir);
    let files = write_outputs(&report, dir, &config.output.prefix)?;
    Ok((report, files))
}
