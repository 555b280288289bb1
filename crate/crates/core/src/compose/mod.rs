//! Systems over hybrid matrices and their parallel, series and feedback
//! compositions; Petri nets with inputs and outputs.

mod format;
mod io_petri;
mod system;

use thiserror::Error;

use crate::hybrid::HybridError;
use crate::petri::PetriError;

pub use io_petri::{IOPetriSystem, IoTrace};
pub use system::{InitialOutput, SystemDyn, SystemTrace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComposeError {
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("{what}: expected {expected} entries, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Hybrid(#[from] HybridError),
    #[error(transparent)]
    Petri(#[from] PetriError),
    #[error("same-step edge {transition} -> {place} makes the place equation implicit")]
    ImplicitEdge { transition: String, place: String },
    #[error("unsupported structure: {0}")]
    Unsupported(String),
}
