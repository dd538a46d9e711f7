use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("permutation mixes spin labels: electron {from} ({from_spin:?}) -> slot {to} ({to_spin:?})")]
    SpinMixingPermutation {
        from: usize,
        to: usize,
        from_spin: crate::configuration::Spin,
        to_spin: crate::configuration::Spin,
    },

    #[error("rotation axis must have unit norm (|axis| = {0})")]
    NonUnitAxis(f64),

    #[error("zero vector where a non-zero vector is required")]
    ZeroVector,

    #[error("electron layout mismatch: expected {expected}, got {actual}")]
    LayoutMismatch { expected: String, actual: String },

    #[error("configuration lies on a node of the trial function (value {0:e})")]
    OnNode(f64),

    #[error("particles coincide (distance {0:e})")]
    Coalescence(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series too short: need at least {needed}, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("population out of bounds at step {step}: {population} walkers (target {target})")]
    Population {
        step: usize,
        population: usize,
        target: usize,
    },

    #[error("zero acceptance in {0} steps; step size is pathological")]
    ZeroAcceptance(usize),

    #[error("at {parameter} = {value}: {source}")]
    ScanPoint {
        parameter: String,
        value: f64,
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
