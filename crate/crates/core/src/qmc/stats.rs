//! Blocking analysis of correlated series and time-step extrapolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_BLOCKING_LENGTH: usize = 64;
/// Levels with fewer blocks than this are too noisy to use.
const MIN_BLOCKS: usize = 32;

/// Mean energy with a one-sigma error bar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    /// Hartree.
    pub mean: f64,
    /// Hartree, one sigma.
    pub error: f64,
    pub n_blocks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub acceptance: f64,
    /// False when the blocking curve never flattened.
    pub plateau: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockingLevel {
    pub block_size: usize,
    pub n_blocks: usize,
    pub error: f64,
    pub error_of_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockingResult {
    pub mean: f64,
    pub error: f64,
    pub n_blocks: usize,
    pub plateau: bool,
    pub levels: Vec<BlockingLevel>,
}

/// Pairwise (Flyvbjerg-Petersen) blocking.
///
/// The error is read at the first level whose next two levels agree with it
/// within twice its own uncertainty; without such a level the largest
/// usable estimate is returned and `plateau` is false.
pub fn blocking_error(series: &[f64]) -> Result<BlockingResult> {
    if series.len() < MIN_BLOCKING_LENGTH {
        return Err(Error::SeriesTooShort {
            needed: MIN_BLOCKING_LENGTH,
            got: series.len(),
        });
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let mut data: Vec<f64> = series.to_vec();
    let mut levels = Vec::new();
    let mut size = 1;
    while data.len() >= 2 {
        let m = data.len();
        let mu = data.iter().sum::<f64>() / m as f64;
        let var = data.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (m as f64 - 1.0);
        let error = (var / m as f64).sqrt();
        levels.push(BlockingLevel {
            block_size: size,
            n_blocks: m,
            error,
            error_of_error: error / (2.0 * (m as f64 - 1.0)).sqrt(),
        });
        data = data.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        size *= 2;
    }
    let usable: Vec<&BlockingLevel> = levels.iter().filter(|l| l.n_blocks >= MIN_BLOCKS).collect();
    let mut chosen = None;
    for k in 0..usable.len().saturating_sub(2) {
        let l = usable[k];
        let band = 2.0 * l.error_of_error;
        if (usable[k + 1].error - l.error).abs() <= band && (usable[k + 2].error - l.error).abs() <= band {
            chosen = Some(k);
            break;
        }
    }
    let (error, n_blocks, plateau) = match chosen {
        Some(k) => {
            // the curve may still creep upward inside the band; take the largest of the three
            let e = usable[k..k + 3].iter().map(|l| l.error).fold(0.0, f64::max);
            (e, usable[k].n_blocks, true)
        }
        None => {
            let best = usable
                .iter()
                .max_by(|a, b| a.error.total_cmp(&b.error))
                .copied()
                .unwrap_or(&levels[0]);
            (best.error, best.n_blocks, false)
        }
    };
    Ok(BlockingResult {
        mean,
        error,
        n_blocks,
        plateau,
        levels,
    })
}

/// Weighted straight-line fit `E(τ) = E₀ + kτ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub intercept: EnergyEstimate,
    pub slope: f64,
    pub slope_error: f64,
    pub chi2: f64,
    pub dof: usize,
}

/// Extrapolates to τ = 0 with weights `1/σ²` (equal weights when every
/// σ is zero) and the intercept error from the fit covariance.
pub fn timestep_extrapolate(points: &[(f64, EnergyEstimate)]) -> Result<Extrapolation> {
    let mut taus: Vec<f64> = points.iter().map(|p| p.0).collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    if taus.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "extrapolation needs at least 2 distinct time steps, got {}",
            taus.len()
        )));
    }
    let all_exact = points.iter().all(|p| p.1.error == 0.0);
    if !all_exact && points.iter().any(|p| !(p.1.error > 0.0)) {
        return Err(Error::InvalidParameter("mixed zero and non-zero error bars".into()));
    }
    let w = |e: &EnergyEstimate| if all_exact { 1.0 } else { 1.0 / (e.error * e.error) };
    let (mut s, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (tau, e) in points {
        let wi = w(e);
        s += wi;
        sx += wi * tau;
        sxx += wi * tau * tau;
        sy += wi * e.mean;
        sxy += wi * tau * e.mean;
    }
    let det = s * sxx - sx * sx;
    let intercept = (sxx * sy - sx * sxy) / det;
    let slope = (s * sxy - sx * sy) / det;
    let chi2: f64 = points
        .iter()
        .map(|(tau, e)| w(e) * (e.mean - intercept - slope * tau).powi(2))
        .sum();
    let (var0, var1) = if all_exact { (0.0, 0.0) } else { (sxx / det, s / det) };
    Ok(Extrapolation {
        intercept: EnergyEstimate {
            mean: intercept,
            error: var0.sqrt(),
            n_blocks: points.iter().map(|p| p.1.n_blocks).sum(),
            tau: Some(0.0),
            acceptance: points.iter().map(|p| p.1.acceptance).sum::<f64>() / points.len() as f64,
            plateau: points.iter().all(|p| p.1.plateau),
        },
        slope,
        slope_error: var1.sqrt(),
        chi2,
        dof: points.len() - 2,
    })
}
