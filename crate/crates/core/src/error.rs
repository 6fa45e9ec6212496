use alloc::string::String;

use crate::elements::AlgorithmId;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),

    #[error("invalid forcing table: {0}")]
    InvalidTable(String),

    #[error("forcing record ends at t = {last_time} but the grid needs t = {requested}")]
    Coverage { requested: f64, last_time: f64 },

    #[error("singular condensation pivot for m = {m}, a = {a}, h = {h}")]
    SingularCondensation { m: f64, a: f64, h: f64 },

    #[error("left step matrix of {alg} is singular at h = {h}")]
    SingularLeftMatrix { alg: AlgorithmId, h: f64 },

    #[error("{alg} is not a temporal finite element algorithm")]
    NotFiniteElement { alg: AlgorithmId },

    #[error("{alg} does not belong to the requested formalism")]
    WrongFormalism { alg: AlgorithmId },

    #[error("no oscillatory eigenvalue pair (real-eigenvalue regime)")]
    NoOscillatoryPair,

    #[error("damping ratio {0} is not underdamped")]
    NotUnderdamped(f64),

    #[error("undamped system driven at its natural frequency")]
    Resonance,

    #[error("trajectory grids do not match: {0}")]
    GridMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("convergence study needs at least {min} levels, got {got}")]
    TooFewLevels { min: usize, got: usize },
}
