//! Continuous timed Petri nets with unit holding times and possibly negative
//! production multiplicities.
//!
//! The dynamics are `P^{k+1} = H·Q^k` (standard) and `Q^{k+1} = D ⊗ P^{k+1}`
//! (minplus). Production edges may also carry a same-step lag, which the
//! priority rewrite and the junction net need.

mod dynamics;
pub mod models;
mod net;
mod rewrite;

use thiserror::Error;

pub use dynamics::{max_residual, NetState, PlaceRecursion, TransitionRecursion};
pub use net::{Determinism, Downstream, EdgeSpec, Lag, NetBuilder, NetSpec, PetriNet, PlaceSpec, ProductionEdge};
pub use rewrite::{build_priority_resolution, build_routing_resolution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PetriError {
    #[error("net is not deterministic; places with != 1 downstream transition: {0:?}")]
    NonDeterministic(Vec<String>),
    #[error("unknown place {0}")]
    UnknownPlace(String),
    #[error("unknown transition {0}")]
    UnknownTransition(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("same-step edges form a cycle through {0:?}")]
    ImplicitCycle(Vec<String>),
    #[error("routing fractions must be nonnegative and sum to 1, got sum {0}")]
    BadFractions(f64),
    #[error("place {place} has {downstream} downstream transitions; only 2-way conflicts are supported")]
    UnsupportedConflict { place: String, downstream: usize },
    #[error("edge lag must be 0 or 1, got {0}")]
    BadLag(u8),
    #[error("holding time of {0} must be >= 1")]
    BadHolding(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid net description: {0}")]
    Format(String),
}
