//! Exit codes: 0 ok, 1 verification failure, 2 parse, 3 structure,
//! 4 nondeterministic net.

use minplus::compose::ComposeError;
use minplus::hybrid::HybridError;
use minplus::petri::PetriError;
use minplus::traffic::TrafficError;
use minplus::tropical::TropicalError;

pub const OK: i32 = 0;
pub const VERIFY: i32 = 1;
pub const PARSE: i32 = 2;
pub const STRUCTURE: i32 = 3;
pub const NONDETERMINISTIC: i32 = 4;

/// An input that could not be read or parsed.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct InputError(pub String);

fn petri(e: &PetriError) -> i32 {
    match e {
        PetriError::NonDeterministic(_) => NONDETERMINISTIC,
        PetriError::Format(_) => PARSE,
        _ => STRUCTURE,
    }
}

/// Code for an error, from the first recognised cause in its chain.
pub fn code_of(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<InputError>() || cause.is::<serde_json::Error>() || cause.is::<csv::Error>() {
            return PARSE;
        }
        if let Some(e) = cause.downcast_ref::<TropicalError>() {
            return match e {
                TropicalError::Parse { .. } | TropicalError::RaggedRow { .. } | TropicalError::Empty => PARSE,
                _ => STRUCTURE,
            };
        }
        if let Some(e) = cause.downcast_ref::<PetriError>() {
            return petri(e);
        }
        if let Some(e) = cause.downcast_ref::<ComposeError>() {
            return match e {
                ComposeError::Parse { .. } | ComposeError::Hybrid(HybridError::Parse { .. }) => PARSE,
                ComposeError::Petri(p) => petri(p),
                _ => STRUCTURE,
            };
        }
        if let Some(e) = cause.downcast_ref::<HybridError>() {
            return match e {
                HybridError::Parse { .. } => PARSE,
                _ => STRUCTURE,
            };
        }
        if let Some(e) = cause.downcast_ref::<TrafficError>() {
            return match e {
                TrafficError::BadWord(_) => PARSE,
                _ => STRUCTURE,
            };
        }
    }
    VERIFY
}
