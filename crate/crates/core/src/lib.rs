//! Simulation and optimization engine for power-splitting reconfigurable
//! intelligent surfaces (RIS).
//!
//! A subset of the RIS unit cells absorbs the impinging RF power to supply
//! the surface electronics while the remaining cells steer the beam toward
//! the receiver. The crate provides:
//!
//! - [`channel`]: planar-array geometry and Rician channel draws,
//! - [`energy`]: the nonlinear rectifier and the RIS consumption model,
//! - [`link`]: thermal noise and end-to-end SNR,
//! - [`policies`]: the greedy allocation policies, exhaustive search and the
//!   equal-gain closed form,
//! - [`montecarlo`]: repeated-trial experiments and their statistics,
//! - [`tracking`]: threshold-triggered reconfiguration along a user path.
//!
//! All powers are in watts and all gains are linear inside the crate; dB
//! conversions live in [`units`] and are only applied at I/O boundaries.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod energy;
pub mod error;
pub mod link;
pub mod montecarlo;
pub mod policies;
pub mod tracking;
pub mod units;

pub use channel::{ChannelRealization, FadingParams, PhaseModel, Placement, RisGeometry};
pub use energy::{HarvesterModel, RisPowerModel};
pub use error::{Error, Result};
pub use link::{NoiseModel, PhaseConfig};
pub use policies::{Allocation, PolicyId, PolicyOutcome, ProblemKind, ProblemSpec};
