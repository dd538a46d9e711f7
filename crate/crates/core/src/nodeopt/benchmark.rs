//! Deterministic He 2³S reference from Rayleigh–Ritz with optimized
//! exponents.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::wavefunction::two_electron::{solve_triplet, TripletSolution};

use super::simplex::nelder_mead;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripletBenchmark {
    pub order: u32,
    pub n_terms: usize,
    pub solution: TripletSolution,
    /// Optimized energy one order lower.
    pub previous_energy: f64,
}

impl TripletBenchmark {
    /// Change of the optimized energy from the previous order (hartree).
    pub fn convergence(&self) -> f64 {
        (self.previous_energy - self.solution.energy).abs()
    }
}

/// Rayleigh–Ritz energy over all `(i, j, k)` up to `order`, minimized over
/// `(α, β)` from `start`.
pub fn optimize_triplet_exponents(order: u32, start: (f64, f64)) -> Result<TripletSolution> {
    let mut f = |x: &[f64]| -> f64 {
        if x[0] <= 0.05 || x[1] <= 0.05 || x[0] > 10.0 || x[1] > 10.0 {
            return f64::INFINITY;
        }
        solve_triplet(order, x[0], x[1], 2.0).map_or(f64::INFINITY, |s| s.energy)
    };
    let r = nelder_mead(&mut f, &[start.0, start.1], &[0.2, 0.1], 1e-11, 400);
    solve_triplet(order, r.x[0], r.x[1], 2.0)
}

/// Optimized He triplet at `order` (35 terms at order 4), with the
/// previous order for the convergence check.
pub fn he_triplet_benchmark(order: u32) -> Result<TripletBenchmark> {
    let start = (2.2, 0.7);
    let previous = optimize_triplet_exponents(order.saturating_sub(1).max(1), start)?;
    let solution = optimize_triplet_exponents(order, (previous.alpha, previous.beta))?;
    Ok(TripletBenchmark {
        order,
        n_terms: solution.rows.len(),
        previous_energy: previous.energy,
        solution,
    })
}
