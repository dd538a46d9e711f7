//! Fixed-node energy as a function of the node parameter `a` of
//! `(r1−r2)(r3−r4) + a r12·r34`.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nodal::NodeFunction;
use crate::qmc::{dmc_run, DmcParams, EnergyEstimate};
use crate::wavefunction::TrialWaveFunction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub value: f64,
    pub energy: EnergyEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub parameter: String,
    pub seed: u64,
    /// Sorted by parameter value.
    pub points: Vec<ScanPoint>,
    pub argmin: usize,
    pub runner_up: Option<usize>,
    /// The minimum lies at least 2σ (combined) below the runner-up; when
    /// false the scan is flat within noise.
    pub significant: bool,
}

impl ScanResult {
    pub fn from_points(parameter: impl Into<String>, seed: u64, mut points: Vec<ScanPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("empty scan".into()));
        }
        points.sort_by(|a, b| a.value.total_cmp(&b.value));
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&i, &j| points[i].energy.mean.total_cmp(&points[j].energy.mean));
        let argmin = order[0];
        let runner_up = order.get(1).copied();
        let significant = runner_up.is_some_and(|r| {
            let (a, b) = (&points[argmin].energy, &points[r].energy);
            b.mean - a.mean >= 2.0 * (a.error * a.error + b.error * b.error).sqrt()
        });
        Ok(Self {
            parameter: parameter.into(),
            seed,
            points,
            argmin,
            runner_up,
            significant,
        })
    }

    pub fn best(&self) -> &ScanPoint {
        &self.points[self.argmin]
    }

    pub fn point(&self, value: f64) -> Option<&ScanPoint> {
        self.points.iter().find(|p| p.value == value)
    }

    /// `parameter,energy,error`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "parameter,energy,error")?;
        for p in &self.points {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", p.value, p.energy.mean, p.energy.error)?;
        }
        Ok(())
    }
}

fn run_point(
    guide_for: &(dyn Fn(&NodeFunction) -> Result<Arc<dyn TrialWaveFunction>> + Sync),
    a: f64,
    nuclear_charge: u32,
    params: &DmcParams,
) -> Result<ScanPoint> {
    let node = NodeFunction::ConjecturedBe { a };
    let run = || -> Result<ScanPoint> {
        let guide = guide_for(&node)?;
        let r = dmc_run(guide.as_ref(), Some(&node), nuclear_charge, params)?;
        Ok(ScanPoint {
            value: a,
            energy: r.energy,
        })
    };
    run().map_err(|e| Error::ScanPoint {
        parameter: "a".into(),
        value: a,
        source: Box::new(e),
    })
}

/// DMC at every `a` (which must include 0) with the same seed, then
/// `refinements` rounds that add the midpoints between the current best
/// point and its neighbours.
pub fn scan_node_parameter(
    guide_for: &(dyn Fn(&NodeFunction) -> Result<Arc<dyn TrialWaveFunction>> + Sync),
    a_values: &[f64],
    nuclear_charge: u32,
    params: &DmcParams,
    refinements: usize,
) -> Result<ScanResult> {
    if !a_values.contains(&0.0) {
        return Err(Error::InvalidParameter("the scan must include a = 0".into()));
    }
    if a_values.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidParameter("scan values must be finite".into()));
    }
    let mut values = a_values.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let points = values
        .par_iter()
        .map(|&a| run_point(guide_for, a, nuclear_charge, params))
        .collect::<Result<Vec<_>>>()?;
    let mut result = ScanResult::from_points("a", params.seed, points)?;
    for _ in 0..refinements {
        let i = result.argmin;
        let v = result.points[i].value;
        let mut extra = Vec::new();
        if i > 0 {
            extra.push(0.5 * (v + result.points[i - 1].value));
        }
        if i + 1 < result.points.len() {
            extra.push(0.5 * (v + result.points[i + 1].value));
        }
        let new = extra
            .par_iter()
            .map(|&a| run_point(guide_for, a, nuclear_charge, params))
            .collect::<Result<Vec<_>>>()?;
        let mut points = result.points;
        points.extend(new);
        result = ScanResult::from_points("a", params.seed, points)?;
    }
    Ok(result)
}
