//! Node functions, crossings, cross-sections and the sign factorization
//! `Ψ = N × (positive)`.

mod crossing;
mod guide;
mod node;
mod section;

pub use crossing::{
    bisect_crossing, crossing_coincidence, write_crossings_jsonl, CoincidenceReport, CrossingRecord,
    DEFAULT_BISECTION_TOLERANCE, DEFAULT_COINCIDENCE_RADIUS,
};
pub use guide::NodeEnvelopeGuide;
pub use node::{node_sign, NodeFunction};
pub use section::{scan_cross_section, CrossSectionSpec, GridPoint, SectionGrid, SectionLayout, MIN_RESOLUTION};

use serde::{Deserialize, Serialize};

use crate::configuration::ElectronConfiguration;
use crate::error::Result;
use crate::wavefunction::{check_layout, TrialWaveFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    /// Samples with both `Ψ` and `N` non-zero.
    pub samples: usize,
    pub skipped: usize,
    /// Fraction of used samples with `Ψ/N > 0`.
    pub positive_fraction: f64,
    /// Largest `|Ψ|` among samples with `Ψ/N < 0`, relative to the largest
    /// `|Ψ|` seen; 0 when there is no violation.
    pub worst_violation: f64,
}

/// Checks that `Ψ/N` keeps one sign (positive) over the samples.
pub fn factorization_positivity(
    wf: &dyn TrialWaveFunction,
    node: &NodeFunction,
    samples: &[ElectronConfiguration],
) -> Result<PositivityReport> {
    let mut used = 0;
    let mut positive = 0;
    let mut skipped = 0;
    let mut max_psi: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for c in samples {
        check_layout(wf, c)?;
        node.check_layout(c)?;
        let psi = wf.value_unchecked(c);
        let n = node.value_unchecked(c);
        if psi == 0.0 || n == 0.0 {
            skipped += 1;
            continue;
        }
        used += 1;
        max_psi = max_psi.max(psi.abs());
        if (psi > 0.0) == (n > 0.0) {
            positive += 1;
        } else {
            worst = worst.max(psi.abs());
        }
    }
    Ok(PositivityReport {
        samples: used,
        skipped,
        positive_fraction: if used == 0 { 0.0 } else { positive as f64 / used as f64 },
        worst_violation: if max_psi > 0.0 { worst / max_psi } else { 0.0 },
    })
}
