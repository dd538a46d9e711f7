//! Sign-change detection along straight segments and the coincidence test
//! between trial-function crossings and node-function crossings.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configuration::ElectronConfiguration;
use crate::error::{Error, Result};
use crate::wavefunction::TrialWaveFunction;

use super::node::NodeFunction;

pub const DEFAULT_BISECTION_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_COINCIDENCE_RADIUS: f64 = 1e-3;
const MAX_BISECTIONS: usize = 200;

/// A located sign change on the segment `start → end`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    /// Index of the segment in the walk (0 for a single bisection).
    pub segment: usize,
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    /// Segment parameter of the crossing, in (0, 1).
    pub t_star: f64,
    pub crossing: Vec<f64>,
    /// Whether the node function also changes sign on this segment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_crossed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_t_star: Option<f64>,
    /// Distance between the two crossings (bohr).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coincident: Option<bool>,
}

/// Bisection on `t` for a sign change of `f` between `a` and `b`.
///
/// Returns `None` when the endpoint signs agree (an even number of
/// crossings goes unnoticed). The bracket is shrunk until its length in
/// configuration space is at most `tol_bohr`.
pub fn bisect_crossing(
    f: &(dyn Fn(&ElectronConfiguration) -> f64 + Sync),
    a: &ElectronConfiguration,
    b: &ElectronConfiguration,
    tol_bohr: f64,
) -> Result<Option<CrossingRecord>> {
    if !(tol_bohr > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bisection tolerance must be positive, got {tol_bohr}"
        )));
    }
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 || !fa.is_finite() {
        return Err(Error::OnNode(fa));
    }
    if fb == 0.0 || !fb.is_finite() {
        return Err(Error::OnNode(fb));
    }
    if (fa > 0.0) == (fb > 0.0) {
        return Ok(None);
    }
    let length = a.distance_to(b);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let positive_at_lo = fa > 0.0;
    let mut exact = None;
    for _ in 0..MAX_BISECTIONS {
        if (hi - lo) * length <= tol_bohr {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(&a.lerp(b, mid));
        if fm == 0.0 {
            exact = Some(mid);
            break;
        }
        if (fm > 0.0) == positive_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_star = exact.unwrap_or(0.5 * (lo + hi));
    Ok(Some(CrossingRecord {
        segment: 0,
        start: a.coordinates(),
        end: b.coordinates(),
        t_star,
        crossing: a.lerp(b, t_star).coordinates(),
        node_crossed: None,
        node_t_star: None,
        separation: None,
        coincident: None,
    }))
}

/// Coincidence statistics between the crossings of a trial function and
/// those of a node function along a walk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceReport {
    pub segments: usize,
    pub total_crossings: usize,
    pub coincident: usize,
    pub non_coincident: usize,
    /// Segments where only the node function changes sign.
    pub node_only_crossings: usize,
    /// Segments skipped because an endpoint sat exactly on a zero.
    pub skipped: usize,
    pub coincidence_radius: f64,
    pub non_coincident_records: Vec<CrossingRecord>,
}

impl CoincidenceReport {
    pub fn non_coincident_fraction(&self) -> f64 {
        if self.total_crossings == 0 {
            0.0
        } else {
            self.non_coincident as f64 / self.total_crossings as f64
        }
    }
}

enum SegmentOutcome {
    Nothing,
    Skipped,
    NodeOnly,
    Crossing(Box<CrossingRecord>),
}

/// Walks consecutive samples; a trial-function crossing is coincident when
/// the node also changes sign on the same segment and the two bisected
/// points are within `radius`. For nodes defined by a radial difference
/// `r_i − r_j` the distance is `|r_i − r_j|` at the trial-function crossing;
/// otherwise it is the configuration-space distance between the points.
pub fn crossing_coincidence(
    wf: &dyn TrialWaveFunction,
    node: &NodeFunction,
    walk: &[ElectronConfiguration],
    radius: f64,
) -> Result<CoincidenceReport> {
    if let Some(c) = walk.first() {
        crate::wavefunction::check_layout(wf, c)?;
        node.check_layout(c)?;
    }
    let psi = |c: &ElectronConfiguration| wf.value_unchecked(c);
    let nf = |c: &ElectronConfiguration| node.value_unchecked(c);
    let outcomes: Vec<SegmentOutcome> = (0..walk.len().saturating_sub(1))
        .into_par_iter()
        .map(|k| -> Result<SegmentOutcome> {
            let (a, b) = (&walk[k], &walk[k + 1]);
            let wf_cross = match bisect_crossing(&psi, a, b, DEFAULT_BISECTION_TOLERANCE) {
                Ok(x) => x,
                Err(Error::OnNode(_)) => return Ok(SegmentOutcome::Skipped),
                Err(e) => return Err(e),
            };
            let node_cross = match bisect_crossing(&nf, a, b, DEFAULT_BISECTION_TOLERANCE) {
                Ok(x) => x,
                Err(Error::OnNode(_)) => return Ok(SegmentOutcome::Skipped),
                Err(e) => return Err(e),
            };
            Ok(match (wf_cross, node_cross) {
                (None, None) => SegmentOutcome::Nothing,
                (None, Some(_)) => SegmentOutcome::NodeOnly,
                (Some(mut rec), node_rec) => {
                    rec.segment = k;
                    rec.node_crossed = Some(node_rec.is_some());
                    if let Some(n) = node_rec {
                        let sep = match node.radial_coordinate() {
                            Some((i, j)) => {
                                let x = a.lerp(b, rec.t_star);
                                (x.radius(i) - x.radius(j)).abs()
                            }
                            None => (rec.t_star - n.t_star).abs() * a.distance_to(b),
                        };
                        rec.node_t_star = Some(n.t_star);
                        rec.separation = Some(sep);
                        rec.coincident = Some(sep <= radius);
                    } else {
                        rec.coincident = Some(false);
                    }
                    SegmentOutcome::Crossing(Box::new(rec))
                }
            })
        })
        .collect::<Result<_>>()?;

    let mut report = CoincidenceReport {
        segments: outcomes.len(),
        total_crossings: 0,
        coincident: 0,
        non_coincident: 0,
        node_only_crossings: 0,
        skipped: 0,
        coincidence_radius: radius,
        non_coincident_records: Vec::new(),
    };
    for o in outcomes {
        match o {
            SegmentOutcome::Nothing => {}
            SegmentOutcome::Skipped => report.skipped += 1,
            SegmentOutcome::NodeOnly => report.node_only_crossings += 1,
            SegmentOutcome::Crossing(rec) => {
                report.total_crossings += 1;
                if rec.coincident == Some(true) {
                    report.coincident += 1;
                } else {
                    report.non_coincident += 1;
                    report.non_coincident_records.push(*rec);
                }
            }
        }
    }
    Ok(report)
}

/// One JSON object per line.
pub fn write_crossings_jsonl<W: Write>(records: &[CrossingRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| Error::Parse(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::{Spin, Vec3};
    use crate::wavefunction::{build_he_triplet_hylleraas, build_li_rhf};

    fn he(r1: f64, r2: f64) -> ElectronConfiguration {
        ElectronConfiguration::new(
            vec![Vec3::new(r1, 0.0, 0.0), Vec3::new(0.0, r2 * 0.6, r2 * 0.8)],
            vec![Spin::Up, Spin::Up],
            2,
        )
        .unwrap()
    }

    #[test]
    fn he_triplet_crossing_lies_on_equal_radii() {
        let wf = build_he_triplet_hylleraas(3, 1.2).unwrap();
        let f = |c: &ElectronConfiguration| wf.value_unchecked(c);
        let rec = bisect_crossing(&f, &he(0.5, 1.5), &he(1.7, 0.9), 1e-10)
            .unwrap()
            .unwrap();
        let x = he(0.5, 1.5).lerp(&he(1.7, 0.9), rec.t_star);
        assert!((x.radius(0) - x.radius(1)).abs() < 1e-8);
        assert!(rec.t_star > 0.0 && rec.t_star < 1.0);
        // bracketed
        let a = he(0.5, 1.5);
        let b = he(1.7, 0.9);
        let dt = 1e-10 / a.distance_to(&b);
        assert_ne!(
            f(&a.lerp(&b, rec.t_star - dt)).signum(),
            f(&a.lerp(&b, rec.t_star + dt)).signum()
        );
    }

    #[test]
    fn same_sign_endpoints_give_none_and_zero_endpoint_errors() {
        let wf = build_he_triplet_hylleraas(1, 1.0).unwrap();
        let f = |c: &ElectronConfiguration| wf.value_unchecked(c);
        assert!(bisect_crossing(&f, &he(0.5, 1.5), &he(0.7, 1.9), 1e-10)
            .unwrap()
            .is_none());
        assert!(matches!(
            bisect_crossing(&f, &he(1.0, 1.0), &he(0.7, 1.9), 1e-10),
            Err(Error::OnNode(_))
        ));
    }

    #[test]
    fn lithium_crossing_lies_on_its_node() {
        let wf = build_li_rhf(2.7, 0.65).unwrap();
        let f = |c: &ElectronConfiguration| wf.value_unchecked(c);
        let spins = vec![Spin::Up, Spin::Down, Spin::Up];
        let a = ElectronConfiguration::new(
            vec![
                Vec3::new(0.2, 0.1, 0.0),
                Vec3::new(1.0, 0.0, 0.3),
                Vec3::new(0.0, 2.5, 0.0),
            ],
            spins.clone(),
            3,
        )
        .unwrap();
        let b = ElectronConfiguration::new(
            vec![
                Vec3::new(2.2, -0.4, 1.0),
                Vec3::new(0.4, 0.5, 0.3),
                Vec3::new(0.3, 0.4, -0.2),
            ],
            spins,
            3,
        )
        .unwrap();
        let rec = bisect_crossing(&f, &a, &b, 1e-10).unwrap().unwrap();
        let x = a.lerp(&b, rec.t_star);
        assert!((x.radius(0) - x.radius(2)).abs() < 1e-8);
    }

    #[test]
    fn jsonl_has_one_line_per_record() {
        let wf = build_he_triplet_hylleraas(1, 1.0).unwrap();
        let f = |c: &ElectronConfiguration| wf.value_unchecked(c);
        let rec = bisect_crossing(&f, &he(0.5, 1.5), &he(1.7, 0.9), 1e-10)
            .unwrap()
            .unwrap();
        let mut buf = Vec::new();
        write_crossings_jsonl(&[rec.clone(), rec], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back: CrossingRecord = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert!(back.t_star > 0.0);
    }
}
