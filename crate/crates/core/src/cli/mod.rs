//! Configuration-driven front end.

pub mod config;
pub mod run;
pub mod verify;

use crate::Error;

/// Process exit code for a failed command: 2 for usage, configuration and I/O
/// problems, 3 for numerical failures. A verification that runs but fails
/// exits with 1.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Singularity { .. } | Error::NumericalAbort { .. } | Error::ImaginaryResidue { .. } => 3,
        _ => 2,
    }
}
