//! Nodal-region counting through permutation images.
//!
//! A nodal region is the set of points reachable from a reference point
//! without crossing a zero of Ψ. For each spin-preserving permutation `P`
//! with `Ψ(PR) = Ψ(R)` the question is whether `R` and `PR` are connected;
//! images of the same sign that are connected belong to one region. A found
//! sign-constant path proves a connection; the absence of one within a
//! budget proves nothing, so counts are upper bounds unless every image
//! was connected.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nalgebra::{Matrix3, Rotation3, Unit};

use crate::configuration::{
    apply_permutation, spin_preserving_permutations, BeReferencePoint, ElectronConfiguration, SpinPermutation, Vec3,
};
use crate::error::{Error, Result};
use crate::nodal::{bisect_crossing, DEFAULT_BISECTION_TOLERANCE};
use crate::qmc::{derive_seed, stream, vmc_run, VmcParams};
use crate::wavefunction::{check_layout, is_zero, TrialWaveFunction};

pub const DEFAULT_ROTATION_STEPS: usize = 256;
/// Relative tolerance for constancy of an S-state function along a rotation.
pub const ROTATION_VALUE_TOLERANCE: f64 = 1e-10;
/// Per-coordinate tolerance for the rotation endpoint.
pub const ENDPOINT_TOLERANCE: f64 = 1e-10;
/// A searched path must keep `|Ψ|` above this fraction of the smaller
/// endpoint value to count as a connection.
pub const PATH_MARGIN: f64 = 1e-6;
const GOLDEN_ITERATIONS: usize = 48;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoint {
    pub coordinates: Vec<f64>,
    pub value: f64,
    /// `Ψ` is non-zero under the scale-free zero test.
    pub valid: bool,
    #[serde(skip)]
    pub config: Option<ElectronConfiguration>,
}

impl ReferencePoint {
    pub fn new(wf: &dyn TrialWaveFunction, config: ElectronConfiguration) -> Result<Self> {
        check_layout(wf, &config)?;
        Ok(Self {
            coordinates: config.coordinates(),
            value: wf.value_unchecked(&config),
            valid: !is_zero(wf, &config),
            config: Some(config),
        })
    }

    fn configuration(&self) -> &ElectronConfiguration {
        self.config.as_ref().expect("constructed with a configuration")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathOutcome {
    Connected,
    CrossedNodeAt { t: f64 },
    Undetermined { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathVerdict {
    pub outcome: PathOutcome,
    /// Points at which Ψ was sampled.
    pub samples: usize,
    /// Smallest `|Ψ|` among the samples.
    pub min_abs_value: f64,
    /// Waypoints of the evidence path (coordinates), endpoints included.
    pub waypoints: Vec<Vec<f64>>,
    /// Largest `|Ψ(t) − Ψ(0)| / |Ψ(0)|` along a rotation path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_relative_deviation: Option<f64>,
    /// Largest coordinate difference between the rotation endpoint and
    /// `P₁₂P₃₄R*`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint_error: Option<f64>,
}

impl PathVerdict {
    pub fn is_connected(&self) -> bool {
        self.outcome == PathOutcome::Connected
    }
}

/// Samples a polyline of configurations and checks that the sign of `Ψ`
/// never changes, bisecting between samples of opposite sign. `t` of a
/// crossing is the fraction of samples passed.
fn sign_along(wf: &dyn TrialWaveFunction, points: &[ElectronConfiguration]) -> Result<(PathOutcome, f64)> {
    let values: Vec<f64> = points.iter().map(|c| wf.value_unchecked(c)).collect();
    let min_abs = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let s0 = values[0] > 0.0;
    let n = (points.len() - 1).max(1) as f64;
    for (k, v) in values.iter().enumerate() {
        if *v == 0.0 || (*v > 0.0) != s0 {
            let t = if k == 0 || *v == 0.0 {
                k as f64 / n
            } else {
                let f = |c: &ElectronConfiguration| wf.value_unchecked(c);
                let rec = bisect_crossing(&f, &points[k - 1], &points[k], DEFAULT_BISECTION_TOLERANCE)?;
                (k as f64 - 1.0 + rec.map_or(0.5, |r| r.t_star)) / n
            };
            return Ok((PathOutcome::CrossedNodeAt { t }, min_abs));
        }
    }
    Ok((PathOutcome::Connected, min_abs))
}

/// Follows the 180° rotation about `r1 × r3` from the reference point,
/// which ends at `P₁₂P₃₄R*`.
pub fn rotation_path_test(
    wf: &dyn TrialWaveFunction,
    reference: &BeReferencePoint,
    n_steps: usize,
) -> Result<PathVerdict> {
    check_layout(wf, &reference.config)?;
    if reference.config.len() != 4 {
        return Err(Error::InvalidParameter("rotation test needs four electrons".into()));
    }
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be positive".into()));
    }
    let path = reference.rotation_path();
    let points: Vec<ElectronConfiguration> = (0..=n_steps).map(|k| path.at(k as f64 / n_steps as f64)).collect();
    let target = apply_permutation(&reference.config, &SpinPermutation::new(vec![1, 0, 3, 2])?)?;
    let endpoint_error = points[n_steps].max_coordinate_difference(&target);
    if endpoint_error > ENDPOINT_TOLERANCE {
        return Err(Error::InvalidConfiguration(format!(
            "rotation endpoint misses the double exchange by {endpoint_error:e}"
        )));
    }
    let waypoints = points.iter().map(|c| c.coordinates()).collect();
    let v0 = wf.value_unchecked(&reference.config);
    if is_zero(wf, &reference.config) {
        let min_abs = points
            .iter()
            .fold(f64::INFINITY, |m, c| m.min(wf.value_unchecked(c).abs()));
        return Ok(PathVerdict {
            outcome: PathOutcome::Undetermined {
                reason: "reference point lies on the node (Ψ(R*) = 0)".into(),
            },
            samples: points.len(),
            min_abs_value: min_abs,
            waypoints,
            max_relative_deviation: None,
            endpoint_error: Some(endpoint_error),
        });
    }
    let (outcome, min_abs) = sign_along(wf, &points)?;
    let deviation = wf.is_s_state().then(|| {
        points
            .iter()
            .map(|c| (wf.value_unchecked(c) - v0).abs() / v0.abs())
            .fold(0.0, f64::max)
    });
    Ok(PathVerdict {
        outcome,
        samples: points.len(),
        min_abs_value: min_abs,
        waypoints,
        max_relative_deviation: deviation,
        endpoint_error: Some(endpoint_error),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSearchBudget {
    /// Interior waypoints of the piecewise-linear path.
    #[serde(default = "default_waypoints")]
    pub waypoints: usize,
    /// Ψ samples per segment.
    #[serde(default = "default_segment_samples")]
    pub samples_per_segment: usize,
    /// Annealing moves.
    pub iterations: usize,
    pub seed: u64,
}

fn default_waypoints() -> usize {
    8
}

fn default_segment_samples() -> usize {
    16
}

impl Default for PathSearchBudget {
    fn default() -> Self {
        Self {
            waypoints: default_waypoints(),
            samples_per_segment: default_segment_samples(),
            iterations: 4000,
            seed: 1,
        }
    }
}

/// Initial temperature and per-move decay of the annealing schedule; the
/// schedule does not depend on the budget, so a larger budget only extends
/// a run.
const INITIAL_TEMPERATURE: f64 = 0.05;
const TEMPERATURE_DECAY: f64 = 0.999;
const INITIAL_MOVE: f64 = 0.3;

/// Rigid rotation taking `a` to `b` (all electrons), if one exists.
pub fn rigid_rotation(a: &ElectronConfiguration, b: &ElectronConfiguration) -> Option<(Vec3, f64)> {
    let mut h = Matrix3::zeros();
    for (p, q) in a.positions().iter().zip(b.positions()) {
        h += p * q.transpose();
    }
    let svd = h.svd(true, true);
    let (u, vt) = (svd.u?, svd.v_t?);
    let mut r = vt.transpose() * u.transpose();
    if r.determinant() < 0.0 {
        let mut v = vt.transpose();
        v.column_mut(2).scale_mut(-1.0);
        r = v * u.transpose();
    }
    let scale = a.positions().iter().map(|p| p.norm()).fold(1.0, f64::max);
    let fits = a
        .positions()
        .iter()
        .zip(b.positions())
        .all(|(p, q)| (r * p - q).norm() <= 1e-9 * scale);
    if !fits {
        return None;
    }
    let rot = Rotation3::from_matrix_unchecked(r);
    match rot.axis_angle() {
        Some((axis, angle)) => Some((axis.into_inner(), angle)),
        None => Some((Vec3::z(), 0.0)),
    }
}

fn rotated(a: &ElectronConfiguration, axis: &Vec3, angle: f64) -> ElectronConfiguration {
    let rot = Rotation3::from_axis_angle(&Unit::new_normalize(*axis), angle);
    a.with_positions_unchecked(a.positions().iter().map(|p| rot * p).collect())
}

/// Minimum of a unimodal-near-its-minimum function on `[lo, hi]`.
fn golden_minimum(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 <= 0.0 || f2 <= 0.0 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

struct Polyline<'a> {
    wf: &'a dyn TrialWaveFunction,
    sign: f64,
    nodes: Vec<ElectronConfiguration>,
    /// Minimum of `sign × Ψ` on each segment (endpoints included).
    segment_min: Vec<f64>,
    samples: usize,
}

impl<'a> Polyline<'a> {
    fn new(wf: &'a dyn TrialWaveFunction, nodes: Vec<ElectronConfiguration>, samples: usize, sign: f64) -> Self {
        let mut p = Self {
            wf,
            sign,
            segment_min: vec![0.0; nodes.len() - 1],
            nodes,
            samples,
        };
        for s in 0..p.segment_min.len() {
            p.segment_min[s] = p.segment_value(s);
        }
        p
    }

    /// Sampled minimum of `sign × Ψ` on a segment, refined by a golden-section
    /// search around the lowest sample. The refinement exposes paths that
    /// touch the node without changing sign, e.g. through an intersection
    /// of two nodal surfaces where Ψ vanishes quadratically.
    fn segment_value(&self, s: usize) -> f64 {
        let (a, b) = (&self.nodes[s], &self.nodes[s + 1]);
        let n = self.samples as f64;
        let f = |t: f64| self.sign * self.wf.value_unchecked(&a.lerp(b, t));
        let (k_min, v_min) = (0..=self.samples)
            .map(|k| (k, f(k as f64 / n)))
            .fold((0, f64::INFINITY), |m, (k, v)| if v < m.1 { (k, v) } else { m });
        if v_min <= 0.0 {
            return v_min;
        }
        let lo = k_min.saturating_sub(1) as f64 / n;
        let hi = (k_min + 1).min(self.samples) as f64 / n;
        v_min.min(golden_minimum(f, lo, hi))
    }

    fn objective(&self) -> f64 {
        self.segment_min.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn dense(&self) -> Vec<ElectronConfiguration> {
        let mut out = vec![self.nodes[0].clone()];
        for s in 0..self.nodes.len() - 1 {
            for k in 1..=self.samples {
                out.push(self.nodes[s].lerp(&self.nodes[s + 1], k as f64 / self.samples as f64));
            }
        }
        out
    }
}

/// Simulated annealing on the interior waypoints of a path from `a` to
/// `b`, maximizing the smallest `sign(Ψ(a)) Ψ` sampled along it. Starts
/// from the rigid rotation between the endpoints when one exists (for
/// S states), otherwise from the straight line. Stops at the first path
/// whose refined minimum of `sign(Ψ(a)) Ψ` exceeds [`PATH_MARGIN`] times
/// the smaller endpoint value.
pub fn stochastic_path_search(
    wf: &dyn TrialWaveFunction,
    a: &ElectronConfiguration,
    b: &ElectronConfiguration,
    budget: &PathSearchBudget,
) -> Result<PathVerdict> {
    check_layout(wf, a)?;
    check_layout(wf, b)?;
    if budget.samples_per_segment == 0 {
        return Err(Error::InvalidParameter("samples_per_segment must be positive".into()));
    }
    let (va, vb) = (wf.value_unchecked(a), wf.value_unchecked(b));
    if is_zero(wf, a) || is_zero(wf, b) {
        return Err(Error::OnNode(if is_zero(wf, a) { va } else { vb }));
    }
    if (va > 0.0) != (vb > 0.0) {
        return Err(Error::InvalidParameter(
            "endpoints have opposite signs and cannot share a nodal region".into(),
        ));
    }
    if a.max_coordinate_difference(b) == 0.0 {
        return Ok(PathVerdict {
            outcome: PathOutcome::Connected,
            samples: 1,
            min_abs_value: va.abs(),
            waypoints: vec![a.coordinates()],
            max_relative_deviation: None,
            endpoint_error: None,
        });
    }
    let m = budget.waypoints;
    let rotation = if wf.is_s_state() { rigid_rotation(a, b) } else { None };
    let nodes: Vec<ElectronConfiguration> = (0..=m + 1)
        .map(|k| {
            let t = k as f64 / (m + 1) as f64;
            if k == m + 1 {
                b.clone()
            } else {
                match &rotation {
                    Some((axis, angle)) => rotated(a, axis, t * angle),
                    None => a.lerp(b, t),
                }
            }
        })
        .collect();
    let sign = va.signum();
    let mut path = Polyline::new(wf, nodes, budget.samples_per_segment, sign);
    let mut rng = stream(budget.seed, 0x7061_7468);
    let mut current = path.objective();
    let mut temperature = INITIAL_TEMPERATURE * va.abs().min(vb.abs());
    let mut step = INITIAL_MOVE;
    let mut iterations = 0;
    let margin = PATH_MARGIN * va.abs().min(vb.abs());
    while current <= margin && iterations < budget.iterations && m > 0 {
        iterations += 1;
        let k = rng.gen_range(1..=m);
        let old = path.nodes[k].clone();
        let moved: Vec<Vec3> = old
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
        path.nodes[k] = old.with_positions_unchecked(moved);
        let (l, r) = (path.segment_min[k - 1], path.segment_min[k]);
        path.segment_min[k - 1] = path.segment_value(k - 1);
        path.segment_min[k] = path.segment_value(k);
        let proposed = path.objective();
        let u: f64 = rng.gen();
        if proposed >= current || u < ((proposed - current) / temperature).exp() {
            current = proposed;
        } else {
            path.nodes[k] = old;
            path.segment_min[k - 1] = l;
            path.segment_min[k] = r;
        }
        temperature *= TEMPERATURE_DECAY;
        step = (step * 0.9995).max(0.02);
    }
    let dense = path.dense();
    let (outcome, min_abs) = sign_along(wf, &dense)?;
    let outcome = match outcome {
        PathOutcome::Connected if current > margin => PathOutcome::Connected,
        PathOutcome::Connected => PathOutcome::Undetermined {
            reason: format!(
                "best path after {iterations} moves touches the node (min |Ψ| {:.3e})",
                current.max(0.0)
            ),
        },
        _ => PathOutcome::Undetermined {
            reason: format!("no sign-constant path found in {iterations} moves"),
        },
    };
    let min_abs = min_abs.min(current.abs());
    Ok(PathVerdict {
        outcome,
        samples: dense.len(),
        min_abs_value: min_abs,
        waypoints: path.nodes.iter().map(|c| c.coordinates()).collect(),
        max_relative_deviation: None,
        endpoint_error: None,
    })
}

/// How to connect a reference to its positive images.
#[derive(Clone, Debug, Default)]
pub struct RegionStrategy {
    /// Use the analytic rotation path for `P₁₂P₃₄` from this point.
    pub rotation: Option<BeReferencePoint>,
    pub rotation_steps: Option<usize>,
    pub search: PathSearchBudget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub mapping: Vec<usize>,
    pub parity: i8,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    /// `rotation` or `search`.
    pub method: String,
    pub verdict: PathVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionCount {
    /// Number of regions; an upper bound unless `exact`.
    pub regions: usize,
    /// Number of spin-preserving permutations.
    pub upper_bound: usize,
    /// True when every positive image was connected to the reference, so
    /// there is one positive and one negative region.
    pub exact: bool,
    pub reference: ReferencePoint,
    pub images: Vec<ImageRecord>,
    pub evidence: Vec<Evidence>,
    pub notes: Vec<String>,
}

/// Connects the reference to each image of the same sign. Regions of the
/// negative sign are their images under any odd permutation, so their
/// count equals the positive count.
pub fn count_nodal_regions(
    wf: &dyn TrialWaveFunction,
    reference: &ReferencePoint,
    strategy: &RegionStrategy,
) -> Result<RegionCount> {
    if !reference.valid {
        return Err(Error::OnNode(reference.value));
    }
    let r = reference.configuration();
    let perms = spin_preserving_permutations(wf.spins());
    let images: Vec<ImageRecord> = perms
        .iter()
        .map(|p| -> Result<ImageRecord> {
            Ok(ImageRecord {
                mapping: p.mapping().to_vec(),
                parity: p.parity(),
                value: wf.value_unchecked(&apply_permutation(r, p)?),
            })
        })
        .collect::<Result<_>>()?;
    let mut notes = Vec::new();
    let positive: Vec<&SpinPermutation> = perms.iter().filter(|p| p.parity() > 0 && !p.is_identity()).collect();

    let mut rotation_note = None;
    let evidence: Vec<Evidence> = positive
        .par_iter()
        .enumerate()
        .map(|(k, p)| -> Result<Evidence> {
            let target = apply_permutation(r, p)?;
            if let Some(rot) = &strategy.rotation {
                if p.mapping() == [1, 0, 3, 2] && rot.config.max_coordinate_difference(r) == 0.0 {
                    let verdict =
                        rotation_path_test(wf, rot, strategy.rotation_steps.unwrap_or(DEFAULT_ROTATION_STEPS))?;
                    return Ok(Evidence {
                        from: (0..r.len()).collect(),
                        to: p.mapping().to_vec(),
                        method: "rotation".into(),
                        verdict,
                    });
                }
            }
            let budget = PathSearchBudget {
                seed: derive_seed(strategy.search.seed, k as u64),
                ..strategy.search.clone()
            };
            Ok(Evidence {
                from: (0..r.len()).collect(),
                to: p.mapping().to_vec(),
                method: "search".into(),
                verdict: stochastic_path_search(wf, r, &target, &budget)?,
            })
        })
        .collect::<Result<_>>()?;
    if let Some(rot) = &strategy.rotation {
        if rot.config.max_coordinate_difference(r) != 0.0 && is_zero(wf, &rot.config) {
            rotation_note = Some(
                "the rotation reference point (r1, -r1, r3, -r3) lies on the node, so the rotation path \
                 cannot connect P12P34 images for this function"
                    .to_string(),
            );
        }
    }
    notes.extend(rotation_note);

    // the reference and every connected positive image form one region
    let unconnected = evidence.iter().filter(|e| !e.verdict.is_connected()).count();
    let positive_regions = 1 + unconnected;
    let exact = unconnected == 0;
    if !exact {
        notes.push(format!(
            "{unconnected} positive image(s) not connected within budget; the count is an upper bound"
        ));
    }
    Ok(RegionCount {
        regions: 2 * positive_regions,
        upper_bound: perms.len(),
        exact,
        reference: reference.clone(),
        images,
        evidence,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilingReport {
    pub pairs: usize,
    pub same_sign_pairs: usize,
    pub opposite_sign_pairs: usize,
    /// Same-sign pairs where some positive image of one end was reached
    /// from the other.
    pub connected: usize,
    pub success_fraction: f64,
}

/// Draws `n_references` pairs from a VMC run of `wf` and tries to reach
/// each same-sign partner, or one of its same-sign permutation images,
/// by path search. Opposite-sign pairs are counted and never connected.
pub fn tiling_spot_check(
    wf: &dyn TrialWaveFunction,
    nuclear_charge: u32,
    n_references: usize,
    budget: &PathSearchBudget,
) -> Result<TilingReport> {
    let vmc = vmc_run(
        wf,
        nuclear_charge,
        &VmcParams {
            n_steps: 64 * (n_references.max(1)),
            step_size: 0.3,
            burn_in: 500,
            seed: derive_seed(budget.seed, 0x74696c65),
            n_chains: 2,
            sample_every: 64,
            record_walk: false,
        },
    )?;
    let samples: Vec<&ElectronConfiguration> = vmc.samples.iter().filter(|c| !is_zero(wf, c)).collect();
    let pairs: Vec<(&ElectronConfiguration, &ElectronConfiguration)> = samples
        .chunks_exact(2)
        .take(n_references)
        .map(|p| (p[0], p[1]))
        .collect();
    let perms: Vec<SpinPermutation> = spin_preserving_permutations(wf.spins())
        .into_iter()
        .filter(|p| p.parity() > 0)
        .collect();
    let results: Vec<Option<bool>> = pairs
        .par_iter()
        .enumerate()
        .map(|(k, (x, y))| -> Result<Option<bool>> {
            if (wf.value_unchecked(x) > 0.0) != (wf.value_unchecked(y) > 0.0) {
                return Ok(None);
            }
            for (j, p) in perms.iter().enumerate() {
                let target = apply_permutation(y, p)?;
                let b = PathSearchBudget {
                    seed: derive_seed(budget.seed, (k * perms.len() + j) as u64),
                    ..budget.clone()
                };
                if stochastic_path_search(wf, x, &target, &b)?.is_connected() {
                    return Ok(Some(true));
                }
            }
            Ok(Some(false))
        })
        .collect::<Result<_>>()?;
    let same = results.iter().filter(|r| r.is_some()).count();
    let connected = results.iter().filter(|r| **r == Some(true)).count();
    Ok(TilingReport {
        pairs: results.len(),
        same_sign_pairs: same,
        opposite_sign_pairs: results.len() - same,
        connected,
        success_fraction: if same == 0 { 0.0 } else { connected as f64 / same as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::{make_be_reference_point, rotate_all, Spin};
    use crate::wavefunction::{build_be_hf, build_be_two_config, build_he_triplet_hylleraas, BeOrbitalExponents};

    fn be_generic() -> ElectronConfiguration {
        ElectronConfiguration::new(
            vec![
                Vec3::new(0.3, 0.1, -0.2),
                Vec3::new(-1.5, 0.8, 0.4),
                Vec3::new(0.1, -0.35, 0.2),
                Vec3::new(1.2, 1.1, -0.9),
            ],
            vec![Spin::Up, Spin::Up, Spin::Down, Spin::Down],
            4,
        )
        .unwrap()
    }

    #[test]
    fn two_config_rotation_connects() {
        let wf = build_be_two_config(0.1, &BeOrbitalExponents::default()).unwrap();
        let r = make_be_reference_point(Vec3::new(0.8, 0.2, 0.1), Vec3::new(0.5, 1.1, -0.3)).unwrap();
        let v = rotation_path_test(&wf, &r, 256).unwrap();
        assert!(v.is_connected());
        assert!(v.max_relative_deviation.unwrap() < 1e-10);
        assert!(v.endpoint_error.unwrap() < 1e-10);
        let reference = ReferencePoint::new(&wf, r.config.clone()).unwrap();
        let count = count_nodal_regions(
            &wf,
            &reference,
            &RegionStrategy {
                rotation: Some(r),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(count.regions, 2);
        assert!(count.exact);
        assert_eq!(count.evidence[0].method, "rotation");
    }

    #[test]
    fn hartree_fock_reference_is_on_node() {
        let wf = build_be_hf(&BeOrbitalExponents::default()).unwrap();
        let r = make_be_reference_point(Vec3::new(0.8, 0.2, 0.1), Vec3::new(0.5, 1.1, -0.3)).unwrap();
        let v = rotation_path_test(&wf, &r, 64).unwrap();
        assert!(matches!(v.outcome, PathOutcome::Undetermined { .. }));
        assert!(!ReferencePoint::new(&wf, r.config.clone()).unwrap().valid);
    }

    #[test]
    fn hartree_fock_has_four_regions() {
        let wf = build_be_hf(&BeOrbitalExponents::default()).unwrap();
        let reference = ReferencePoint::new(&wf, be_generic()).unwrap();
        assert!(reference.valid);
        let budget = PathSearchBudget {
            iterations: 500,
            ..Default::default()
        };
        let count = count_nodal_regions(
            &wf,
            &reference,
            &RegionStrategy {
                search: budget,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(count.regions, 4);
        assert!(!count.exact);
        assert_eq!(count.upper_bound, 4);
    }

    #[test]
    fn touching_the_node_is_not_a_connection() {
        // The straight line from R to P12P34 R passes r1 = r2 and r3 = r4 at
        // the same time, where the HF value vanishes without changing sign.
        let wf = build_be_hf(&BeOrbitalExponents::default()).unwrap();
        let a = be_generic();
        let p = a.positions();
        let b = a.with_positions_unchecked(vec![p[1], p[0], p[3], p[2]]);
        let budget = PathSearchBudget {
            waypoints: 0,
            samples_per_segment: 15,
            ..Default::default()
        };
        let dense: Vec<_> = (0..=15).map(|k| a.lerp(&b, k as f64 / 15.0)).collect();
        assert_eq!(sign_along(&wf, &dense).unwrap().0, PathOutcome::Connected);
        let v = stochastic_path_search(&wf, &a, &b, &budget).unwrap();
        assert!(!v.is_connected(), "{:?}", v.outcome);
        assert!(v.min_abs_value < 1e-12 * wf.value_unchecked(&a).abs());
    }

    #[test]
    fn search_trivial_cases() {
        let wf = build_be_two_config(0.1, &BeOrbitalExponents::default()).unwrap();
        let a = be_generic();
        let v = stochastic_path_search(&wf, &a, &a, &PathSearchBudget::default()).unwrap();
        assert!(v.is_connected());
        let axis = Vec3::new(1.0, 2.0, -0.5).normalize();
        let b = rotate_all(&a, &axis, 2.0).unwrap();
        let v = stochastic_path_search(
            &wf,
            &a,
            &b,
            &PathSearchBudget {
                iterations: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(v.is_connected());
    }

    #[test]
    fn opposite_signs_are_rejected() {
        let wf = build_be_hf(&BeOrbitalExponents::default()).unwrap();
        let a = be_generic();
        let b = apply_permutation(&a, &SpinPermutation::new(vec![1, 0, 2, 3]).unwrap()).unwrap();
        assert!(stochastic_path_search(&wf, &a, &b, &PathSearchBudget::default()).is_err());
    }

    #[test]
    fn he_triplet_two_regions() {
        let wf = build_he_triplet_hylleraas(1, 1.0).unwrap();
        let c = ElectronConfiguration::new(
            vec![Vec3::new(1.5, 0.0, 0.0), Vec3::new(0.0, 0.5, 0.0)],
            vec![Spin::Up, Spin::Up],
            2,
        )
        .unwrap();
        let reference = ReferencePoint::new(&wf, c).unwrap();
        let count = count_nodal_regions(&wf, &reference, &RegionStrategy::default()).unwrap();
        assert_eq!(count.regions, 2);
        assert!(count.exact);
        assert_eq!(count.upper_bound, 2);
    }

    #[test]
    fn rigid_rotation_is_recovered() {
        let a = be_generic();
        let axis = Vec3::new(0.2, -1.0, 0.4).normalize();
        let b = rotate_all(&a, &axis, 1.1).unwrap();
        let (ax, ang) = rigid_rotation(&a, &b).unwrap();
        assert!((rotated(&a, &ax, ang).max_coordinate_difference(&b)) < 1e-10);
        let mut moved = b.positions().to_vec();
        moved[0].x += 0.1;
        assert!(rigid_rotation(&a, &b.with_positions_unchecked(moved)).is_none());
    }
}
