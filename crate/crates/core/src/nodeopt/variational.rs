//! Variational optimization by correlated sampling.
//!
//! Each round draws a fixed sample from `|Ψ(p)|²` and minimizes the
//! reweighted energy `Σ w E_L(q) / Σ w`, `w = Ψ(q)²/Ψ(p)²`, over `q` with a
//! simplex; all trial points of a round share the same sample.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configuration::ElectronConfiguration;
use crate::error::{Error, Result};
use crate::qmc::{derive_seed, vmc_run, EnergyEstimate, VmcParams};
use crate::wavefunction::{ratios, TrialWaveFunction};

use super::simplex::nelder_mead;
use super::space::ParameterSpace;

/// Builds a trial function from a parameter vector.
pub type Family<'a> = dyn Fn(&[f64]) -> Result<Arc<dyn TrialWaveFunction>> + Sync + 'a;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationalBudget {
    /// Sampling run of each round; `sample_every` must be positive.
    pub sampling: VmcParams,
    pub rounds: usize,
    /// Objective evaluations per simplex run.
    pub max_evaluations: usize,
    /// Reject trial points whose effective sample size falls below this
    /// fraction of the sample.
    #[serde(default = "default_effective_fraction")]
    pub min_effective_fraction: f64,
}

fn default_effective_fraction() -> f64 {
    0.3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub parameters: Vec<f64>,
    /// Fresh VMC energy at `parameters`.
    pub energy: EnergyEstimate,
    /// Lowest fresh energy seen so far.
    pub best_energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalResult {
    pub names: Vec<String>,
    pub parameters: Vec<f64>,
    pub energy: EnergyEstimate,
    pub history: Vec<RoundRecord>,
    /// False when no round beat the starting point.
    pub improved: bool,
}

/// Reweighted energy of `wf` over samples drawn from `|Ψ_ref|²`, with the
/// effective sample fraction `(Σw)² / (N Σw²)`.
pub fn reweighted_energy(
    wf: &dyn TrialWaveFunction,
    samples: &[ElectronConfiguration],
    reference_values: &[f64],
) -> (f64, f64) {
    let terms: Vec<Option<(f64, f64)>> = samples
        .par_iter()
        .zip(reference_values)
        .map(|(c, &v0)| {
            let e = ratios(c, &wf.derivatives_unchecked(c))?;
            let w = (e.value / v0).powi(2);
            (w.is_finite() && e.local_energy.is_finite()).then_some((w, e.local_energy))
        })
        .collect();
    let (mut sw, mut sw2, mut swe) = (0.0, 0.0, 0.0);
    for (w, e) in terms.into_iter().flatten() {
        sw += w;
        sw2 += w * w;
        swe += w * e;
    }
    if sw == 0.0 {
        return (f64::INFINITY, 0.0);
    }
    (swe / sw, sw * sw / (sw2 * samples.len() as f64))
}

pub fn optimize_variational(
    family: &Family<'_>,
    nuclear_charge: u32,
    space: &ParameterSpace,
    budget: &VariationalBudget,
) -> Result<VariationalResult> {
    space.validate()?;
    if budget.sampling.sample_every == 0 {
        return Err(Error::InvalidParameter("sampling.sample_every must be positive".into()));
    }
    if budget.rounds == 0 {
        return Err(Error::InvalidParameter("at least one round is required".into()));
    }
    let mut p = space.initial();
    let mut steps = space.steps();
    let mut history = Vec::with_capacity(budget.rounds + 1);
    let mut best: Option<(Vec<f64>, EnergyEstimate, usize)> = None;

    for round in 0..=budget.rounds {
        let wf = family(&p)?;
        let params = VmcParams {
            seed: derive_seed(budget.sampling.seed, round as u64),
            ..budget.sampling.clone()
        };
        let vmc = vmc_run(wf.as_ref(), nuclear_charge, &params)?;
        if best.as_ref().is_none_or(|b| vmc.energy.mean < b.1.mean) {
            best = Some((p.clone(), vmc.energy, round));
        }
        history.push(RoundRecord {
            round,
            parameters: p.clone(),
            energy: vmc.energy,
            best_energy: best.as_ref().map(|b| b.1.mean).unwrap_or(f64::INFINITY),
        });
        if round == budget.rounds {
            break;
        }
        let reference: Vec<f64> = vmc.samples.iter().map(|c| wf.value_unchecked(c)).collect();
        let mut objective = |q: &[f64]| -> f64 {
            if !space.contains(q) {
                return f64::INFINITY;
            }
            let Ok(trial) = family(q) else { return f64::INFINITY };
            let (e, ess) = reweighted_energy(trial.as_ref(), &vmc.samples, &reference);
            if ess < budget.min_effective_fraction {
                f64::INFINITY
            } else {
                e
            }
        };
        let r = nelder_mead(&mut objective, &p, &steps, 1e-9, budget.max_evaluations);
        p = r.x;
        steps.iter_mut().for_each(|s| *s *= 0.5);
    }
    let (parameters, energy, round) = best.expect("at least one round ran");
    Ok(VariationalResult {
        names: space.names(),
        parameters,
        energy,
        history,
        improved: round > 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodeopt::space::Parameter;
    use crate::wavefunction::{build_hydrogenic, two_electron::solve_triplet_powers, HylleraasWaveFunction};

    fn budget(seed: u64, rounds: usize) -> VariationalBudget {
        VariationalBudget {
            sampling: VmcParams {
                n_steps: 8000,
                step_size: 0.5,
                burn_in: 300,
                seed,
                n_chains: 32,
                sample_every: 4,
                record_walk: false,
            },
            rounds,
            max_evaluations: 200,
            min_effective_fraction: 0.3,
        }
    }

    #[test]
    fn hydrogen_exponent() {
        let space = ParameterSpace::new(vec![Parameter::new("zeta", 0.3, 2.0, 0.7)]).unwrap();
        let family = |p: &[f64]| -> Result<Arc<dyn TrialWaveFunction>> { Ok(Arc::new(build_hydrogenic(p[0])?)) };
        let r = optimize_variational(&family, 1, &space, &budget(11, 3)).unwrap();
        assert!((r.parameters[0] - 1.0).abs() < 0.01, "{:?}", r.parameters);
        assert!((r.energy.mean + 0.5).abs() < 1e-3, "{:?}", r.energy);
        assert!(r.improved);
        for w in r.history.windows(2) {
            assert!(w[1].best_energy <= w[0].best_energy);
        }
    }

    #[test]
    fn single_term_he_triplet() {
        // one antisymmetrized product e^{-αr1-βr2} with two exponents
        let space = ParameterSpace::new(vec![
            Parameter::new("alpha", 1.0, 3.0, 1.6),
            Parameter::new("beta", 0.2, 1.5, 0.9),
        ])
        .unwrap();
        let family = |p: &[f64]| -> Result<Arc<dyn TrialWaveFunction>> {
            Ok(Arc::new(HylleraasWaveFunction::he_triplet(
                &[(0, 0, 0, 1.0)],
                p[0],
                p[1],
            )?))
        };
        let r = optimize_variational(&family, 2, &space, &budget(12, 4)).unwrap();
        // deterministic oracle: exact Rayleigh quotient on a grid
        // α = β makes the antisymmetrized product vanish
        let exact = |a: f64, b: f64| solve_triplet_powers(&[(0, 0, 0)], a, b, 2.0).map_or(f64::INFINITY, |s| s.energy);
        let mut grid_min = f64::INFINITY;
        for a in (0..=100).map(|k| 1.0 + 0.02 * k as f64) {
            for b in (0..=65).map(|k| 0.2 + 0.02 * k as f64) {
                grid_min = grid_min.min(exact(a, b));
            }
        }
        assert!(grid_min <= -2.16, "{grid_min}");
        let at_optimum = exact(r.parameters[0], r.parameters[1]);
        assert!(at_optimum <= -2.16, "{:?} -> {at_optimum}", r.parameters);
        assert!(
            (r.energy.mean - at_optimum).abs() < 3.0 * r.energy.error,
            "{:?} vs {at_optimum}",
            r.energy
        );
    }
}
