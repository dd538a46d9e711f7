//! Fixed-node diffusion Monte Carlo with importance sampling.
//!
//! Drift-diffusion moves of all electrons with per-electron drift limiting,
//! a Metropolis accept/reject step on the guide, modified local energies in
//! the branching factor and integer branching. With a node function the
//! sampled amplitude is `|Ψ_G| × sign(N)`, otherwise it is `Ψ_G`; a move that
//! changes that sign is rejected, so each walker stays inside the nodal
//! pocket it started in.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configuration::{ElectronConfiguration, Vec3};
use crate::error::{Error, Result};
use crate::nodal::NodeFunction;
use crate::wavefunction::{check_layout, ratios, Evaluation, TrialWaveFunction};

use super::rng::{derive_seed, stream, StreamRng};
use super::stats::{blocking_error, EnergyEstimate};
use super::vmc::{vmc_run, VmcParams};

/// Drift-limiting constant.
const DRIFT_LIMIT: f64 = 1.0;
/// Abort when the population leaves `[target / 10, 10 × target]`.
const POPULATION_ABORT_FACTOR: usize = 10;
/// Generations averaged for the reference energy during equilibration.
const EQUILIBRATION_WINDOW: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmcParams {
    /// Time step (hartree⁻¹).
    pub tau: f64,
    pub target_population: usize,
    pub equilibration_steps: usize,
    pub measurement_steps: usize,
    /// Generations between trial-energy updates.
    #[serde(default = "default_period")]
    pub trial_energy_period: usize,
    pub seed: u64,
    /// Proposal width of the VMC run that draws the initial walkers.
    #[serde(default = "default_vmc_step")]
    pub vmc_step_size: f64,
    #[serde(default = "default_vmc_burn_in")]
    pub vmc_burn_in: usize,
}

fn default_period() -> usize {
    10
}

fn default_vmc_step() -> f64 {
    0.2
}

fn default_vmc_burn_in() -> usize {
    500
}

impl DmcParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "time step must be positive, got {}",
                self.tau
            )));
        }
        if self.target_population < 100 {
            return Err(Error::InvalidParameter(format!(
                "target population must be at least 100, got {}",
                self.target_population
            )));
        }
        if self.trial_energy_period == 0 {
            return Err(Error::InvalidParameter("trial energy period must be positive".into()));
        }
        if self.measurement_steps < super::stats::MIN_BLOCKING_LENGTH {
            return Err(Error::InvalidParameter(format!(
                "need at least {} measurement steps, got {}",
                super::stats::MIN_BLOCKING_LENGTH,
                self.measurement_steps
            )));
        }
        Ok(())
    }
}

/// One walker of the ensemble.
#[derive(Clone, Debug)]
pub struct Walker {
    pub config: ElectronConfiguration,
    pub eval: Evaluation,
    pub weight: f64,
    /// Generations since the last accepted move.
    pub age: usize,
    pub lineage: u64,
    node_sign: bool,
    limited_ratio: f64,
    rng: StreamRng,
}

/// Per-generation record of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generation {
    pub step: usize,
    pub energy: f64,
    pub population: usize,
    pub weight: f64,
    pub trial_energy: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DmcSummary {
    pub system: String,
    pub guide: String,
    pub node: String,
    pub tau: f64,
    pub tau_effective: f64,
    pub population: f64,
    pub steps: usize,
    pub energy: f64,
    pub error: f64,
    pub acceptance: f64,
    pub plateau: bool,
    pub max_age: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct DmcResult {
    pub energy: EnergyEstimate,
    pub tau_effective: f64,
    pub mean_population: f64,
    pub max_age: usize,
    pub guide_label: String,
    pub node_label: String,
    pub params: DmcParams,
    /// Measurement generations only.
    pub trace: Vec<Generation>,
}

impl DmcResult {
    pub fn summary(&self, system: &str) -> DmcSummary {
        DmcSummary {
            system: system.to_string(),
            guide: self.guide_label.clone(),
            node: self.node_label.clone(),
            tau: self.params.tau,
            tau_effective: self.tau_effective,
            population: self.mean_population,
            steps: self.params.measurement_steps,
            energy: self.energy.mean,
            error: self.energy.error,
            acceptance: self.energy.acceptance,
            plateau: self.energy.plateau,
            max_age: self.max_age,
            seed: self.params.seed,
        }
    }

    /// `step,energy,population,weight,trial_energy`, one row per generation.
    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "step,energy,population,weight,trial_energy")?;
        for g in &self.trace {
            writeln!(
                out,
                "{},{:.16e},{},{:.16e},{:.16e}",
                g.step, g.energy, g.population, g.weight, g.trial_energy
            )?;
        }
        Ok(())
    }
}

/// `|v̄|/|v|` factor applied to every electron's drift.
fn limit_factor(v2: f64, tau: f64) -> f64 {
    let x = DRIFT_LIMIT * v2 * tau;
    if x < 1e-8 {
        1.0 - 0.5 * x
    } else {
        (-1.0 + (1.0 + 2.0 * x).sqrt()) / x
    }
}

/// Limited drift `v̄ τ` per electron and `|v̄|/|v|` over all electrons.
fn limited_drift(eval: &Evaluation, tau: f64) -> (Vec<Vec3>, f64) {
    let mut total = 0.0;
    let mut limited = 0.0;
    let drift = eval
        .gradient
        .iter()
        .map(|v| {
            let v2 = v.norm_squared();
            let f = limit_factor(v2, tau);
            total += v2;
            limited += f * f * v2;
            v * (f * tau)
        })
        .collect();
    let ratio = if total > 0.0 { (limited / total).sqrt() } else { 1.0 };
    (drift, ratio)
}

fn node_positive(node: Option<&NodeFunction>, eval: &Evaluation, config: &ElectronConfiguration) -> bool {
    match node {
        Some(n) => n.value_unchecked(config) > 0.0,
        None => eval.value > 0.0,
    }
}

struct MoveOutcome {
    multiplicity: usize,
    /// Weighted mixed-estimator contribution `w · E`.
    weighted_energy: f64,
    weight: f64,
    /// Acceptance probability times the proposed diffusion length², and the
    /// length² itself.
    accepted_diffusion: f64,
    diffusion: f64,
    accepted: bool,
}

struct Context<'a> {
    guide: &'a dyn TrialWaveFunction,
    node: Option<&'a NodeFunction>,
    tau: f64,
    tau_eff: f64,
    e_best: f64,
    e_trial: f64,
}

impl Walker {
    fn new(
        config: ElectronConfiguration,
        guide: &dyn TrialWaveFunction,
        node: Option<&NodeFunction>,
        tau: f64,
        seed: u64,
        lineage: u64,
    ) -> Result<Self> {
        let eval = ratios(&config, &guide.derivatives_unchecked(&config)).ok_or(Error::OnNode(0.0))?;
        let (_, limited_ratio) = limited_drift(&eval, tau);
        Ok(Self {
            node_sign: node_positive(node, &eval, &config),
            config,
            eval,
            weight: 1.0,
            age: 0,
            lineage,
            limited_ratio,
            rng: stream(seed, lineage),
        })
    }

    /// Modified local energy `E_best − (E_best − E_L)|v̄|/|v|`.
    fn modified_energy(e_best: f64, local: f64, ratio: f64) -> f64 {
        e_best - (e_best - local) * ratio
    }

    fn advance(&mut self, ctx: &Context<'_>) -> MoveOutcome {
        let tau = ctx.tau;
        let sqrt_tau = tau.sqrt();
        let (drift, _) = limited_drift(&self.eval, tau);
        let mut diffusion = 0.0;
        let mut forward = 0.0;
        let positions: Vec<Vec3> = self
            .config
            .positions()
            .iter()
            .zip(&drift)
            .map(|(p, d)| {
                let chi = Vec3::new(
                    self.rng.sample::<f64, _>(StandardNormal),
                    self.rng.sample::<f64, _>(StandardNormal),
                    self.rng.sample::<f64, _>(StandardNormal),
                ) * sqrt_tau;
                diffusion += chi.norm_squared();
                forward += chi.norm_squared();
                p + d + chi
            })
            .collect();
        let trial = self.config.with_positions_unchecked(positions);
        let u: f64 = self.rng.gen();
        let u_branch: f64 = self.rng.gen();

        let old_s = Self::modified_energy(ctx.e_best, self.eval.local_energy, self.limited_ratio);
        let mut p = 0.0;
        let mut new_state = None;
        if let Some(eval) = ratios(&trial, &ctx.guide.derivatives_unchecked(&trial)) {
            // with a node override the guide enters as |Ψ_G| × sign(N)
            let same_sign = node_positive(ctx.node, &eval, &trial) == self.node_sign;
            if same_sign && eval.local_energy.is_finite() {
                let (back_drift, ratio) = limited_drift(&eval, tau);
                let backward: f64 = self
                    .config
                    .positions()
                    .iter()
                    .zip(trial.positions())
                    .zip(&back_drift)
                    .map(|((old, new), d)| (old - new - d).norm_squared())
                    .sum();
                let log_ratio = 2.0 * (eval.value / self.eval.value).abs().ln() - (backward - forward) / (2.0 * tau);
                p = log_ratio.min(0.0).exp();
                new_state = Some((trial, eval, ratio));
            }
        }
        let q = 1.0 - p;
        let (energy, s_new) = match &new_state {
            Some((_, eval, ratio)) => (
                p * eval.local_energy + q * self.eval.local_energy,
                Self::modified_energy(ctx.e_best, eval.local_energy, *ratio),
            ),
            None => (self.eval.local_energy, old_s),
        };
        let branching_energy = p * 0.5 * (s_new + old_s) + q * old_s;
        let factor = (ctx.tau_eff * (ctx.e_trial - branching_energy)).exp();
        let weight = self.weight * factor;

        let accepted = match new_state {
            Some((trial, eval, ratio)) if u < p => {
                self.config = trial;
                self.eval = eval;
                self.limited_ratio = ratio;
                self.age = 0;
                true
            }
            _ => {
                self.age += 1;
                false
            }
        };
        self.weight = weight;
        let multiplicity = (weight + u_branch).floor() as usize;
        MoveOutcome {
            multiplicity,
            weighted_energy: weight * energy,
            weight,
            accepted_diffusion: p * diffusion,
            diffusion,
            accepted,
        }
    }
}

/// Runs fixed-node DMC for `guide`; with `node` given, the node function
/// replaces the sign of the guide. Walkers start from a VMC sample of the
/// guide. Parallel over walkers in the current rayon pool; results do not
/// depend on the number of threads.
pub fn dmc_run(
    guide: &dyn TrialWaveFunction,
    node: Option<&NodeFunction>,
    nuclear_charge: u32,
    params: &DmcParams,
) -> Result<DmcResult> {
    params.validate()?;
    if let Some(n) = node {
        if n.spins() != guide.spins() {
            return Err(Error::LayoutMismatch {
                expected: format!("{:?}", guide.spins()),
                actual: format!("{:?}", n.spins()),
            });
        }
    }
    let target = params.target_population;
    let vmc = vmc_run(
        guide,
        nuclear_charge,
        &VmcParams {
            n_steps: 64,
            step_size: params.vmc_step_size,
            burn_in: params.vmc_burn_in,
            seed: derive_seed(params.seed, 0x766d63),
            n_chains: target,
            sample_every: 64,
            record_walk: false,
        },
    )?;
    let mut next_lineage = 0u64;
    let mut walkers = Vec::with_capacity(target);
    for config in vmc.samples {
        check_layout(guide, &config)?;
        let ok = node.is_none_or(|n| n.value_unchecked(&config) != 0.0);
        if ok {
            walkers.push(Walker::new(config, guide, node, params.tau, params.seed, next_lineage)?);
            next_lineage += 1;
        }
    }

    let mut e_best = vmc.energy.mean;
    let mut e_trial = e_best;
    let mut window = std::collections::VecDeque::with_capacity(EQUILIBRATION_WINDOW);
    let (mut sum_accepted_diffusion, mut sum_diffusion) = (0.0, 0.0);
    let (mut moves, mut accepted_moves) = (0u64, 0u64);
    let mut trace = Vec::with_capacity(params.measurement_steps);
    let (mut total_weighted_energy, mut total_weight) = (0.0, 0.0);
    let mut population_sum = 0.0;
    let mut max_age = 0;
    let total_steps = params.equilibration_steps + params.measurement_steps;

    for step in 0..total_steps {
        let tau_eff = if sum_diffusion > 0.0 {
            params.tau * sum_accepted_diffusion / sum_diffusion
        } else {
            params.tau
        };
        let ctx = Context {
            guide,
            node,
            tau: params.tau,
            tau_eff,
            e_best,
            e_trial,
        };
        let outcomes: Vec<MoveOutcome> = walkers.par_iter_mut().map(|w| w.advance(&ctx)).collect();

        let (mut gen_we, mut gen_w) = (0.0, 0.0);
        for (w, o) in walkers.iter().zip(&outcomes) {
            gen_we += o.weighted_energy;
            gen_w += o.weight;
            sum_accepted_diffusion += o.accepted_diffusion;
            sum_diffusion += o.diffusion;
            moves += 1;
            accepted_moves += u64::from(o.accepted);
            max_age = max_age.max(w.age);
        }
        let gen_energy = gen_we / gen_w;

        let mut next = Vec::with_capacity(walkers.len() + walkers.len() / 4);
        for (mut w, o) in walkers.into_iter().zip(outcomes) {
            if o.multiplicity == 0 {
                continue;
            }
            w.weight = 1.0;
            for _ in 1..o.multiplicity {
                let mut child = w.clone();
                child.lineage = next_lineage;
                child.rng = stream(params.seed, next_lineage);
                next_lineage += 1;
                next.push(child);
            }
            next.push(w);
        }
        walkers = next;
        let population = walkers.len();
        if population > POPULATION_ABORT_FACTOR * target || population * POPULATION_ABORT_FACTOR < target {
            return Err(Error::Population {
                step,
                population,
                target,
            });
        }

        let measuring = step >= params.equilibration_steps;
        if measuring {
            total_weighted_energy += gen_we;
            total_weight += gen_w;
            population_sum += population as f64;
            e_best = total_weighted_energy / total_weight;
            trace.push(Generation {
                step,
                energy: gen_energy,
                population,
                weight: gen_w,
                trial_energy: e_trial,
            });
        } else {
            if window.len() == EQUILIBRATION_WINDOW {
                window.pop_front();
            }
            window.push_back(gen_energy);
            e_best = window.iter().sum::<f64>() / window.len() as f64;
        }
        if (step + 1) % params.trial_energy_period == 0 {
            e_trial =
                e_best - (population as f64 / target as f64).ln() / (params.trial_energy_period as f64 * params.tau);
        }
    }

    let series: Vec<f64> = trace.iter().map(|g| g.energy).collect();
    let blocking = blocking_error(&series)?;
    let tau_effective = if sum_diffusion > 0.0 {
        params.tau * sum_accepted_diffusion / sum_diffusion
    } else {
        params.tau
    };
    Ok(DmcResult {
        energy: EnergyEstimate {
            mean: total_weighted_energy / total_weight,
            error: blocking.error,
            n_blocks: blocking.n_blocks,
            tau: Some(params.tau),
            acceptance: accepted_moves as f64 / moves as f64,
            plateau: blocking.plateau,
        },
        tau_effective,
        mean_population: population_sum / params.measurement_steps as f64,
        max_age,
        guide_label: guide.label(),
        node_label: node.map_or_else(|| "guide".to_string(), NodeFunction::label),
        params: params.clone(),
        trace,
    })
}
