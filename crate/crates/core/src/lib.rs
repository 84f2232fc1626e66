//! Construction and verification of n-th order SUSY partner potentials of
//! the free particle via the finite-difference Backlund superposition of
//! Riccati solutions.
//!
//! - [`seeds`]: the four closed-form first-order superpotential families.
//! - [`chain`]: the iterated superposition building `beta_k` and `V_k`,
//!   with pole detection and classification.
//! - [`analysis`]: closed-form reference potentials and a well census.
//! - [`quantum`]: Numerov integration, scattering coefficients and
//!   bound-state shooting for `H = -1/2 d^2/dx^2 + V` (`hbar = m = 1`).

pub mod analysis;
pub mod chain;
pub mod error;
pub mod quantum;
pub mod seeds;

pub use analysis::{v1_closed_form, v2_closed_form, well_census, well_census_sample, TwoWellParams, Well};
pub use chain::{
    backlund_step, count_poles, BacklundChain, GridSample, LevelValue, PoleCount, PoleKind,
    PoleLocation,
};
pub use error::SusyError;
pub use quantum::{bound_states, numerov_integrate, scattering, BoundStateResult, ScatteringResult, Wavefunction};
pub use seeds::{Family, SeedFunction, SeedSpec, SeedValue};
