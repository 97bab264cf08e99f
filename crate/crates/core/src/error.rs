use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max |A - A^H| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("index {index} out of range for {len} generators")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("imaginary residue {residue:e} in {what} exceeds tolerance")]
    ImaginaryResidue { what: &'static str, residue: f64 },

    #[error("numerical abort at step {step} (t = {time}): {reason}")]
    NumericalAbort { step: usize, time: f64, reason: String },

    #[error("g(t) does not commute with itself at different times (max |[g(ti), g(tj)]| = {residual:e})")]
    NonCommuting { residual: f64 },

    #[error("Wei-Norman singularity: |cos Y2| = {cos_upsilon2:e} (Y2 = {upsilon2}){}", time.map(|t| format!(" at t = {t}")).unwrap_or_default())]
    Singularity { upsilon2: f64, cos_upsilon2: f64, time: Option<f64> },

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
