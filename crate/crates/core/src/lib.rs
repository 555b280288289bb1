//! Minplus (tropical) algebra, the hybrid standard/minplus matrix calculus,
//! Petri nets with negative production weights, additively homogeneous
//! dynamics and the traffic models built on top of them.

pub mod scalar;
pub mod compose;
pub mod dynamics;
pub mod hybrid;
pub mod petri;
pub mod traffic;
pub mod tropical;

pub use scalar::{ExtendedReal, ScalarError, E, EPS};
