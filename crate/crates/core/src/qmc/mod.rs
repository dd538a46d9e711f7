//! Variational and diffusion Monte Carlo.

mod dmc;
mod rng;
mod stats;
mod vmc;

pub use dmc::{dmc_run, DmcParams, DmcResult, DmcSummary, Generation, Walker};
pub use rng::{derive_seed, mix, stream, StreamRng};
pub use stats::{
    blocking_error, timestep_extrapolate, BlockingLevel, BlockingResult, EnergyEstimate, Extrapolation,
    MIN_BLOCKING_LENGTH,
};
pub use vmc::{initial_configuration, vmc_run, VmcParams, VmcResult};
