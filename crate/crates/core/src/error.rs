use crate::chain::PoleKind;
use thiserror::Error;

/// Errors shared by the whole crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SusyError {
    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("chain needs at least one seed")]
    EmptyChain,

    #[error("factorization energies must be pairwise distinct: seeds {first} and {second} both have e = {energy}")]
    DuplicateEnergy {
        first: usize,
        second: usize,
        energy: f64,
    },

    /// Evaluation hit a pole. `level` is the chain level at which the pole
    /// event originated (1 for seed poles).
    #[error("singular point at x = {x} (level {level}, {kind})")]
    SingularPoint { x: f64, level: usize, kind: PoleKind },

    /// Raw superposition step denominator vanished.
    #[error("superposition denominator vanished: |d| = {magnitude:e} <= guard {guard:e}")]
    DenominatorZero { magnitude: f64, guard: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("integration step must be positive and resolve the interval")]
    InvalidStep,

    #[error("potential has not decayed at box edge x = {x}: |V| = {value:e} exceeds {tolerance:e}")]
    AsymptoteNotReached { x: f64, value: f64, tolerance: f64 },

    #[error("potential is singular inside the integration box near x = {x}")]
    SingularPotential { x: f64 },
}
