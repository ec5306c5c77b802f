//! Simulation of a moving three-level cascade atom coupled to a single
//! quantized cavity mode.
//!
//! Two independent engines compute the overlap ⟨ψ(0)|ψ(τ)⟩ and the phases
//! derived from it:
//!
//! - [`analytic`] evaluates the closed-form resonant series;
//! - [`evolver`] propagates the state numerically, block by block, for any
//!   detuning and motion profile.
//!
//! Time is measured in units of the inverse coupling constant (τ = g·t)
//! throughout.

pub mod analytic;
pub mod eigen;
pub mod error;
pub mod evolver;
pub mod field;
pub mod observables;
pub mod scenario;
pub mod summation;
pub mod system;

pub use error::{Error, Result};
pub use field::{FieldSpec, PhotonDistribution};
pub use system::{CompositeState, Level, ManifoldBlock, ManifoldKind, Motion, SystemConfig};
