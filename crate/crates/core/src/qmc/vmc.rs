//! Metropolis sampling of `|Ψ|²`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configuration::{ElectronConfiguration, Vec3};
use crate::error::{Error, Result};
use crate::wavefunction::{ratios, TrialWaveFunction};

use super::rng::{stream, StreamRng};
use super::stats::{blocking_error, EnergyEstimate};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VmcParams {
    /// Measured steps per chain.
    pub n_steps: usize,
    /// Standard deviation of the Gaussian all-electron proposal per
    /// coordinate (bohr).
    pub step_size: f64,
    pub burn_in: usize,
    pub seed: u64,
    #[serde(default = "default_chains")]
    pub n_chains: usize,
    /// Keep every chain's configuration every `sample_every` steps
    /// (0 keeps none).
    #[serde(default)]
    pub sample_every: usize,
    /// Record the full trajectory of chain 0.
    #[serde(default)]
    pub record_walk: bool,
}

fn default_chains() -> usize {
    64
}

impl VmcParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step size must be positive, got {}",
                self.step_size
            )));
        }
        if self.n_chains == 0 || self.n_steps == 0 {
            return Err(Error::InvalidParameter("n_chains and n_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct VmcResult {
    pub energy: EnergyEstimate,
    /// Mean electron-nucleus distance (bohr).
    pub mean_radius: EnergyEstimate,
    /// Variance of the local energy over all samples.
    pub variance: f64,
    pub samples: Vec<ElectronConfiguration>,
    pub walk: Vec<ElectronConfiguration>,
}

struct Chain {
    config: ElectronConfiguration,
    value: f64,
    local_energy: f64,
    rng: StreamRng,
    accepted: u64,
}

/// A starting point with `Ψ ≠ 0` and finite local energy: electrons drawn
/// from a Gaussian of width `1.5/√Z` bohr.
pub fn initial_configuration(
    wf: &dyn TrialWaveFunction,
    nuclear_charge: u32,
    rng: &mut impl Rng,
) -> Result<ElectronConfiguration> {
    let width = 1.5 / f64::from(nuclear_charge.max(1)).sqrt();
    for _ in 0..10_000 {
        let positions: Vec<Vec3> = wf
            .spins()
            .iter()
            .map(|_| {
                Vec3::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                ) * width
            })
            .collect();
        let c = ElectronConfiguration::new(positions, wf.spins().to_vec(), nuclear_charge)?;
        if let Some(e) = ratios(&c, &wf.derivatives_unchecked(&c)) {
            if e.local_energy.is_finite() {
                return Ok(c);
            }
        }
    }
    Err(Error::InvalidParameter(format!(
        "no valid starting point found for {}",
        wf.label()
    )))
}

fn propose(config: &ElectronConfiguration, step: f64, rng: &mut impl Rng) -> ElectronConfiguration {
    let positions = config
        .positions()
        .iter()
        .map(|p| {
            p + Vec3::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            ) * step
        })
        .collect();
    config.with_positions_unchecked(positions)
}

impl Chain {
    fn new(wf: &dyn TrialWaveFunction, z: u32, seed: u64, id: u64) -> Result<Self> {
        let mut rng = stream(seed, id);
        let config = initial_configuration(wf, z, &mut rng)?;
        let e = ratios(&config, &wf.derivatives_unchecked(&config)).ok_or(Error::OnNode(0.0))?;
        Ok(Self {
            config,
            value: e.value,
            local_energy: e.local_energy,
            rng,
            accepted: 0,
        })
    }

    fn step(&mut self, wf: &dyn TrialWaveFunction, step: f64) {
        let trial = propose(&self.config, step, &mut self.rng);
        let v = wf.value_unchecked(&trial);
        let ratio = (v / self.value).powi(2);
        let u: f64 = self.rng.gen();
        if v != 0.0 && ratio.is_finite() && u < ratio {
            if let Some(e) = ratios(&trial, &wf.derivatives_unchecked(&trial)) {
                if e.local_energy.is_finite() {
                    self.config = trial;
                    self.value = e.value;
                    self.local_energy = e.local_energy;
                    self.accepted += 1;
                }
            }
        }
    }
}

/// Runs `n_chains` independent Metropolis chains in lock step; the energy
/// series is the chain average per step, analysed by blocking.
pub fn vmc_run(wf: &dyn TrialWaveFunction, nuclear_charge: u32, params: &VmcParams) -> Result<VmcResult> {
    params.validate()?;
    let mut chains = (0..params.n_chains as u64)
        .map(|id| Chain::new(wf, nuclear_charge, params.seed, id))
        .collect::<Result<Vec<_>>>()?;
    for _ in 0..params.burn_in {
        chains.par_iter_mut().for_each(|c| c.step(wf, params.step_size));
    }
    for c in &mut chains {
        c.accepted = 0;
    }
    let mut energies = Vec::with_capacity(params.n_steps);
    let mut radii = Vec::with_capacity(params.n_steps);
    let mut samples = Vec::new();
    let mut walk = Vec::new();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let norm = params.n_chains as f64;
    for step in 0..params.n_steps {
        chains.par_iter_mut().for_each(|c| c.step(wf, params.step_size));
        let mut e = 0.0;
        let mut r = 0.0;
        for c in &chains {
            e += c.local_energy;
            sum += c.local_energy;
            sum_sq += c.local_energy * c.local_energy;
            r += c.config.positions().iter().map(|p| p.norm()).sum::<f64>() / c.config.len() as f64;
        }
        energies.push(e / norm);
        radii.push(r / norm);
        if params.sample_every > 0 && (step + 1) % params.sample_every == 0 {
            samples.extend(chains.iter().map(|c| c.config.clone()));
        }
        if params.record_walk {
            walk.push(chains[0].config.clone());
        }
    }
    let accepted: u64 = chains.iter().map(|c| c.accepted).sum();
    if accepted == 0 {
        return Err(Error::ZeroAcceptance(params.n_steps * params.n_chains));
    }
    let acceptance = accepted as f64 / (params.n_steps * params.n_chains) as f64;
    let total = (params.n_steps * params.n_chains) as f64;
    let mean = sum / total;
    let estimate = |series: &[f64]| -> Result<EnergyEstimate> {
        let b = blocking_error(series)?;
        Ok(EnergyEstimate {
            mean: b.mean,
            error: b.error,
            n_blocks: b.n_blocks,
            tau: None,
            acceptance,
            plateau: b.plateau,
        })
    };
    Ok(VmcResult {
        energy: estimate(&energies)?,
        mean_radius: estimate(&radii)?,
        variance: (sum_sq / total - mean * mean).max(0.0),
        samples,
        walk,
    })
}
