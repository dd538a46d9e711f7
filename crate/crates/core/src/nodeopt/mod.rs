//! Parameter optimization: variational optimization of trial functions and
//! fixed-node energy scans over node parameters.

mod benchmark;
mod linear;
mod scan;
mod simplex;
mod space;
mod variational;

pub use benchmark::{he_triplet_benchmark, optimize_triplet_exponents, TripletBenchmark};
pub use linear::{li_hylleraas_basis, optimize_linear, LinearBudget, LinearResult};
pub use scan::{scan_node_parameter, ScanPoint, ScanResult};
pub use simplex::{nelder_mead, SimplexResult};
pub use space::{Parameter, ParameterSpace, MAX_DIMENSION};
pub use variational::{
    optimize_variational, reweighted_energy, Family, RoundRecord, VariationalBudget, VariationalResult,
};
