//! Linear-coefficient optimization of Hylleraas expansions by the
//! sampled generalized eigenvalue problem `H c = E S c`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configuration::ElectronConfiguration;
use crate::error::{Error, Result};
use crate::qmc::{derive_seed, vmc_run, EnergyEstimate, VmcParams};
use crate::wavefunction::two_electron::lowest_eigenpair;
use crate::wavefunction::{potential_energy, HylleraasTerm, HylleraasWaveFunction, TrialWaveFunction};

/// Samples reduced per parallel task; fixed so sums do not depend on the
/// thread count.
const CHUNK: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearBudget {
    pub sampling: VmcParams,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct LinearResult {
    pub wave_function: HylleraasWaveFunction,
    /// VMC energy of the sampling function of each iteration, then of the
    /// final function.
    pub energies: Vec<EnergyEstimate>,
    /// Lowest sampled eigenvalue of each iteration.
    pub eigenvalues: Vec<f64>,
}

/// Terms `r1^i r2^j r3^k r12^l r13^m r23^n e^{−α(r1+r2) − β r3}` with total
/// order `<= max_order`, one representative per pair related by the
/// relabelling 1↔2 (which the ²S projection maps onto each other). The
/// first term has coefficient 1, the others 0.
pub fn li_hylleraas_basis(max_order: u32, alpha: f64, beta: f64) -> Vec<HylleraasTerm> {
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut powers = vec![0u32; 6];
    fn rec(pos: usize, left: u32, powers: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == powers.len() {
            out.push(powers.clone());
            return;
        }
        for p in 0..=left {
            powers[pos] = p;
            rec(pos + 1, left - p, powers, out);
        }
        powers[pos] = 0;
    }
    let mut all = Vec::new();
    rec(0, max_order, &mut powers, &mut all);
    all.sort_by_key(|p| (p.iter().sum::<u32>(), std::cmp::Reverse(p.clone())));
    for p in all {
        let swapped = vec![p[1], p[0], p[2], p[3], p[5], p[4]];
        let key = p.clone().max(swapped);
        if seen.insert(key) {
            out.push(HylleraasTerm {
                powers: p,
                exponents: vec![alpha, alpha, beta, 0.0, 0.0, 0.0],
                coefficient: if out.is_empty() { 1.0 } else { 0.0 },
            });
        }
    }
    out
}

fn basis_functions(wf: &HylleraasWaveFunction) -> Result<Vec<HylleraasWaveFunction>> {
    (0..wf.series().terms().len())
        .map(|k| HylleraasWaveFunction::new(wf.series().basis_function(k), wf.scheme(), format!("basis {k}")))
        .collect()
}

/// Sampled `S_kl = ⟨φ_k φ_l / g²⟩` and `H_kl = ⟨φ_k Hφ_l / g²⟩` (symmetrized).
fn sampled_matrices(
    basis: &[HylleraasWaveFunction],
    guide: &dyn TrialWaveFunction,
    samples: &[ElectronConfiguration],
) -> (DMatrix<f64>, DMatrix<f64>) {
    let k = basis.len();
    let partial: Vec<(DMatrix<f64>, DMatrix<f64>)> = samples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut s = DMatrix::zeros(k, k);
            let mut h = DMatrix::zeros(k, k);
            let mut phi = vec![0.0; k];
            let mut hphi = vec![0.0; k];
            for c in chunk {
                let g = guide.value_unchecked(c);
                if g == 0.0 {
                    continue;
                }
                let v = potential_energy(c);
                for (b, (p, hp)) in basis.iter().zip(phi.iter_mut().zip(hphi.iter_mut())) {
                    let d = b.derivatives_unchecked(c);
                    *p = d.value / g;
                    *hp = (-0.5 * d.laplacian + v * d.value) / g;
                }
                for a in 0..k {
                    for b in 0..k {
                        s[(a, b)] += phi[a] * phi[b];
                        h[(a, b)] += phi[a] * hphi[b];
                    }
                }
            }
            (s, h)
        })
        .collect();
    let mut s = DMatrix::zeros(k, k);
    let mut h = DMatrix::zeros(k, k);
    for (ps, ph) in partial {
        s += ps;
        h += ph;
    }
    let n = samples.len() as f64;
    s /= n;
    h /= n;
    let h = (&h + h.transpose()) * 0.5;
    (s, h)
}

/// Iterates: sample `|g|²` (the initial guide, then the current expansion),
/// solve for the coefficients, resample.
pub fn optimize_linear(
    wf: &HylleraasWaveFunction,
    nuclear_charge: u32,
    initial_guide: Option<Arc<dyn TrialWaveFunction>>,
    budget: &LinearBudget,
) -> Result<LinearResult> {
    if budget.sampling.sample_every == 0 {
        return Err(Error::InvalidParameter("sampling.sample_every must be positive".into()));
    }
    let basis = basis_functions(wf)?;
    let mut guide: Arc<dyn TrialWaveFunction> = match initial_guide {
        Some(g) => {
            if g.spins() != wf.spins() {
                return Err(Error::LayoutMismatch {
                    expected: format!("{:?}", wf.spins()),
                    actual: format!("{:?}", g.spins()),
                });
            }
            g
        }
        None => Arc::new(wf.clone()),
    };
    let mut current = wf.clone();
    let mut energies = Vec::new();
    let mut eigenvalues = Vec::new();
    for it in 0..=budget.iterations {
        let params = VmcParams {
            seed: derive_seed(budget.sampling.seed, it as u64),
            ..budget.sampling.clone()
        };
        let vmc = vmc_run(guide.as_ref(), nuclear_charge, &params)?;
        energies.push(vmc.energy);
        if it == budget.iterations {
            break;
        }
        let (s, h) = sampled_matrices(&basis, guide.as_ref(), &vmc.samples);
        let (e, c) = lowest_eigenpair(&s, &h)?;
        eigenvalues.push(e);
        let mut coeffs: Vec<f64> = c.iter().copied().collect();
        // keep the sign of the sampling function on the first sample
        if let Some(x) = vmc.samples.first() {
            let probe = HylleraasWaveFunction::new(wf.series().with_coefficients(&coeffs)?, wf.scheme(), "")?;
            if probe.value_unchecked(x) * guide.value_unchecked(x) < 0.0 {
                coeffs.iter_mut().for_each(|v| *v = -*v);
            }
        }
        current = HylleraasWaveFunction::new(
            wf.series().with_coefficients(&coeffs)?,
            wf.scheme(),
            format!("{} (optimized)", wf.label()),
        )?;
        guide = Arc::new(current.clone());
    }
    Ok(LinearResult {
        wave_function: current,
        energies,
        eigenvalues,
    })
}
