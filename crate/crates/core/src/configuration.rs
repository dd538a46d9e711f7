//! Electron configurations, distance tables, spin-preserving permutations
//! and rigid rotations about the nucleus.
//!
//! The nucleus is clamped at the origin. All lengths are in bohr.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Tolerance on the norm of a rotation axis.
pub const AXIS_NORM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

/// Positions of N electrons around a nucleus of charge Z at the origin.
///
/// Spin labels are shared and never change after construction; moves only
/// replace positions.
#[derive(Clone, PartialEq)]
pub struct ElectronConfiguration {
    positions: Vec<Vec3>,
    spins: Arc<[Spin]>,
    nuclear_charge: u32,
}

impl fmt::Debug for ElectronConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ElectronConfiguration")
            .field("Z", &self.nuclear_charge)
            .field(
                "electrons",
                &self
                    .positions
                    .iter()
                    .zip(self.spins.iter())
                    .map(|(p, s)| (s, [p.x, p.y, p.z]))
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl ElectronConfiguration {
    pub fn new(positions: Vec<Vec3>, spins: Vec<Spin>, nuclear_charge: u32) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidConfiguration("need at least one electron".into()));
        }
        if positions.len() != spins.len() {
            return Err(Error::InvalidConfiguration(format!(
                "{} positions but {} spin labels",
                positions.len(),
                spins.len()
            )));
        }
        check_finite(&positions)?;
        Ok(Self {
            positions,
            spins: spins.into(),
            nuclear_charge,
        })
    }

    /// New configuration with the same spins and charge but different positions.
    pub fn with_positions(&self, positions: Vec<Vec3>) -> Result<Self> {
        if positions.len() != self.positions.len() {
            return Err(Error::InvalidConfiguration(format!(
                "expected {} positions, got {}",
                self.positions.len(),
                positions.len()
            )));
        }
        check_finite(&positions)?;
        Ok(self.with_positions_unchecked(positions))
    }

    /// Hot-path variant of [`with_positions`](Self::with_positions) for
    /// callers that guarantee the length and finiteness.
    pub fn with_positions_unchecked(&self, positions: Vec<Vec3>) -> Self {
        debug_assert_eq!(positions.len(), self.positions.len());
        Self {
            positions,
            spins: Arc::clone(&self.spins),
            nuclear_charge: self.nuclear_charge,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> Vec3 {
        self.positions[i]
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn nuclear_charge(&self) -> u32 {
        self.nuclear_charge
    }

    /// Nucleus-electron distance of electron `i`.
    pub fn radius(&self, i: usize) -> f64 {
        self.positions[i].norm()
    }

    pub fn pair_distance(&self, i: usize, j: usize) -> f64 {
        (self.positions[i] - self.positions[j]).norm()
    }

    pub fn distances(&self) -> DistanceTable {
        interparticle_distances(self)
    }

    /// Flattened coordinates `[x1, y1, z1, x2, ...]`.
    pub fn coordinates(&self) -> Vec<f64> {
        self.positions.iter().flat_map(|p| [p.x, p.y, p.z]).collect()
    }

    pub fn from_coordinates(&self, coords: &[f64]) -> Result<Self> {
        if coords.len() != 3 * self.len() {
            return Err(Error::InvalidConfiguration(format!(
                "expected {} coordinates, got {}",
                3 * self.len(),
                coords.len()
            )));
        }
        self.with_positions(coords.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect())
    }

    /// Straight-line interpolation `(1-t) self + t other`.
    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        let positions = self
            .positions
            .iter()
            .zip(&other.positions)
            .map(|(a, b)| a + (b - a) * t)
            .collect();
        self.with_positions_unchecked(positions)
    }

    /// Largest per-coordinate difference to `other`.
    pub fn max_coordinate_difference(&self, other: &Self) -> f64 {
        self.positions
            .iter()
            .zip(&other.positions)
            .map(|(a, b)| (a - b).amax())
            .fold(0.0, f64::max)
    }

    /// Euclidean distance in the full 3N-dimensional space.
    pub fn distance_to(&self, other: &Self) -> f64 {
        self.positions
            .iter()
            .zip(&other.positions)
            .map(|(a, b)| (a - b).norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    pub fn up_electrons(&self) -> Vec<usize> {
        self.indices_with(Spin::Up)
    }

    pub fn down_electrons(&self) -> Vec<usize> {
        self.indices_with(Spin::Down)
    }

    fn indices_with(&self, spin: Spin) -> Vec<usize> {
        self.spins
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == spin)
            .map(|(i, _)| i)
            .collect()
    }
}

fn check_finite(positions: &[Vec3]) -> Result<()> {
    if let Some(i) = positions.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(Error::InvalidConfiguration(format!(
            "electron {i} has a non-finite coordinate"
        )));
    }
    Ok(())
}

/// Nucleus-electron distances `r_i` and the symmetric electron-electron table `r_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceTable {
    radii: Vec<f64>,
    pairs: Vec<f64>,
    n: usize,
}

impl DistanceTable {
    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn pair(&self, i: usize, j: usize) -> f64 {
        self.pairs[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Smallest electron-electron distance, `+inf` for a single electron.
    pub fn min_pair(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.n {
            for j in i + 1..self.n {
                m = m.min(self.pair(i, j));
            }
        }
        m
    }

    pub fn min_radius(&self) -> f64 {
        self.radii.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest relative deviation from another table.
    pub fn max_relative_difference(&self, other: &Self) -> f64 {
        let rel = |a: f64, b: f64| {
            let scale = a.abs().max(b.abs());
            if scale == 0.0 {
                0.0
            } else {
                (a - b).abs() / scale
            }
        };
        let radial = self.radii.iter().zip(&other.radii).map(|(a, b)| rel(*a, *b));
        let pair = self.pairs.iter().zip(&other.pairs).map(|(a, b)| rel(*a, *b));
        radial.chain(pair).fold(0.0, f64::max)
    }
}

pub fn interparticle_distances(config: &ElectronConfiguration) -> DistanceTable {
    let n = config.len();
    let radii = config.positions.iter().map(|p| p.norm()).collect();
    let mut pairs = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = config.pair_distance(i, j);
            pairs[i * n + j] = d;
            pairs[j * n + i] = d;
        }
    }
    DistanceTable { radii, pairs, n }
}

/// A permutation of electron labels that never exchanges an up electron with
/// a down electron.
///
/// Applying the permutation places the old position of electron
/// `mapping[i]` into slot `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinPermutation {
    mapping: Vec<usize>,
    parity: i8,
}

impl SpinPermutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || seen[m] {
                return Err(Error::InvalidParameter(format!(
                    "{mapping:?} is not a bijection on 0..{n}"
                )));
            }
            seen[m] = true;
        }
        let parity = permutation_parity(&mapping);
        Ok(Self { mapping, parity })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n).collect(),
            parity: 1,
        }
    }

    /// Exchange of electrons `i` and `j` (0-based).
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n || i == j {
            return Err(Error::InvalidParameter(format!(
                "transposition ({i} {j}) invalid for {n} electrons"
            )));
        }
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.swap(i, j);
        Ok(Self { mapping, parity: -1 })
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        let mapping = self.mapping.iter().map(|&i| other.mapping[i]).collect();
        Self {
            mapping,
            parity: self.parity * other.parity,
        }
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// Checks that the permutation only exchanges electrons of equal spin.
    pub fn check_spins(&self, spins: &[Spin]) -> Result<()> {
        if spins.len() != self.mapping.len() {
            return Err(Error::LayoutMismatch {
                expected: format!("{} electrons", self.mapping.len()),
                actual: format!("{} electrons", spins.len()),
            });
        }
        for (to, &from) in self.mapping.iter().enumerate() {
            if spins[from] != spins[to] {
                return Err(Error::SpinMixingPermutation {
                    from,
                    to,
                    from_spin: spins[from],
                    to_spin: spins[to],
                });
            }
        }
        Ok(())
    }
}

fn permutation_parity(mapping: &[usize]) -> i8 {
    let mut visited = vec![false; mapping.len()];
    let mut parity = 1i8;
    for start in 0..mapping.len() {
        if visited[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !visited[i] {
            visited[i] = true;
            i = mapping[i];
            len += 1;
        }
        if len % 2 == 0 {
            parity = -parity;
        }
    }
    parity
}

/// All permutations that act within the up set and within the down set,
/// identity first.
pub fn spin_preserving_permutations(spins: &[Spin]) -> Vec<SpinPermutation> {
    let up: Vec<usize> = (0..spins.len()).filter(|&i| spins[i] == Spin::Up).collect();
    let down: Vec<usize> = (0..spins.len()).filter(|&i| spins[i] == Spin::Down).collect();
    let mut out = Vec::new();
    for pu in permutations_of(&up) {
        for pd in permutations_of(&down) {
            let mut mapping: Vec<usize> = (0..spins.len()).collect();
            for (slot, src) in up.iter().zip(&pu) {
                mapping[*slot] = *src;
            }
            for (slot, src) in down.iter().zip(&pd) {
                mapping[*slot] = *src;
            }
            out.push(SpinPermutation {
                parity: permutation_parity(&mapping),
                mapping,
            });
        }
    }
    out
}

fn permutations_of(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut tail in permutations_of(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

pub fn apply_permutation(config: &ElectronConfiguration, perm: &SpinPermutation) -> Result<ElectronConfiguration> {
    perm.check_spins(config.spins())?;
    let positions = perm.mapping.iter().map(|&i| config.positions[i]).collect();
    Ok(config.with_positions_unchecked(positions))
}

fn unit_axis(axis: &Vec3) -> Result<Unit<Vec3>> {
    let norm = axis.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > AXIS_NORM_TOLERANCE {
        return Err(Error::NonUnitAxis(norm));
    }
    Ok(Unit::new_unchecked(*axis))
}

/// Rotates every electron by `angle` radians about `axis` through the nucleus.
pub fn rotate_all(config: &ElectronConfiguration, axis: &Vec3, angle: f64) -> Result<ElectronConfiguration> {
    let rot = Rotation3::from_axis_angle(&unit_axis(axis)?, angle);
    let positions = config.positions.iter().map(|p| rot * p).collect();
    Ok(config.with_positions_unchecked(positions))
}

/// Rigid rotation of a whole configuration, parameterized by `t ∈ [0, 1]`.
#[derive(Clone, Debug)]
pub struct RotationPath {
    axis: Vec3,
    start: ElectronConfiguration,
    total_angle: f64,
}

impl RotationPath {
    pub fn new(start: ElectronConfiguration, axis: Vec3, total_angle: f64) -> Result<Self> {
        unit_axis(&axis)?;
        if !(0.0..=std::f64::consts::PI).contains(&total_angle) {
            return Err(Error::InvalidParameter(format!(
                "total angle {total_angle} outside [0, pi]"
            )));
        }
        Ok(Self {
            axis,
            start,
            total_angle,
        })
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn start(&self) -> &ElectronConfiguration {
        &self.start
    }

    pub fn total_angle(&self) -> f64 {
        self.total_angle
    }

    pub fn at(&self, t: f64) -> ElectronConfiguration {
        rotate_all(&self.start, &self.axis, t * self.total_angle).expect("axis validated at construction")
    }
}

/// The four-electron point `(r1, -r1, r3, -r3)` (up, up, down, down) together
/// with the geometric facts the two-region argument needs.
#[derive(Clone, Debug)]
pub struct BeReferencePoint {
    pub config: ElectronConfiguration,
    pub r1: Vec3,
    pub r3: Vec3,
    /// `r1 · r3 = 0`: the (2p)² configuration vanishes here.
    pub perpendicular: bool,
    /// `r1 × r3 = 0`: the cross product gives no axis and `axis` is a fallback.
    pub parallel: bool,
    /// Unit rotation axis, `r1 × r3` normalized, or a vector orthogonal to `r1`
    /// when the inputs are parallel.
    pub axis: Vec3,
}

impl BeReferencePoint {
    pub fn rotation_path(&self) -> RotationPath {
        RotationPath::new(self.config.clone(), self.axis, std::f64::consts::PI).expect("axis is unit by construction")
    }
}

/// Relative tolerance used for the perpendicular/parallel flags.
pub const REFERENCE_FLAG_TOLERANCE: f64 = 1e-12;

pub fn make_be_reference_point(r1: Vec3, r3: Vec3) -> Result<BeReferencePoint> {
    let n1 = r1.norm();
    let n3 = r3.norm();
    if n1 == 0.0 || n3 == 0.0 {
        return Err(Error::ZeroVector);
    }
    if !(n1.is_finite() && n3.is_finite()) {
        return Err(Error::InvalidConfiguration("non-finite reference vector".into()));
    }
    let scale = n1 * n3;
    let perpendicular = r1.dot(&r3).abs() <= REFERENCE_FLAG_TOLERANCE * scale;
    let cross = r1.cross(&r3);
    let parallel = cross.norm() <= REFERENCE_FLAG_TOLERANCE * scale;
    let axis = if parallel {
        orthogonal_unit(&r1)
    } else {
        cross / cross.norm()
    };
    let config = ElectronConfiguration::new(
        vec![r1, -r1, r3, -r3],
        vec![Spin::Up, Spin::Up, Spin::Down, Spin::Down],
        4,
    )?;
    Ok(BeReferencePoint {
        config,
        r1,
        r3,
        perpendicular,
        parallel,
        axis,
    })
}

/// A unit vector orthogonal to `v` (which must be non-zero).
pub fn orthogonal_unit(v: &Vec3) -> Vec3 {
    // cross with the coordinate axis least aligned with v
    let a = v.abs();
    let e = if a.x <= a.y && a.x <= a.z {
        Vec3::x()
    } else if a.y <= a.z {
        Vec3::y()
    } else {
        Vec3::z()
    };
    v.cross(&e).normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_config(rng: &mut impl Rng, spins: &[Spin]) -> ElectronConfiguration {
        let positions = spins
            .iter()
            .map(|_| {
                Vec3::new(
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                )
            })
            .collect();
        ElectronConfiguration::new(positions, spins.to_vec(), 4).unwrap()
    }

    const BE: [Spin; 4] = [Spin::Up, Spin::Up, Spin::Down, Spin::Down];

    #[test]
    fn pythagoras() {
        let c = ElectronConfiguration::new(
            vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
            vec![Spin::Up, Spin::Up],
            2,
        )
        .unwrap();
        let d = c.distances();
        assert_eq!(d.radius(0), 1.0);
        assert_eq!(d.radius(1), 1.0);
        assert_relative_eq!(d.pair(0, 1), 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(d.pair(0, 1), d.pair(1, 0));
    }

    #[test]
    fn electron_at_origin() {
        let c = ElectronConfiguration::new(vec![Vec3::zeros()], vec![Spin::Up], 1).unwrap();
        assert_eq!(c.distances().radius(0), 0.0);
    }

    #[test]
    fn distances_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let c = random_config(&mut rng, &BE);
            let d = c.distances();
            let x = c.coordinates();
            for i in 0..4 {
                let r = (x[3 * i].powi(2) + x[3 * i + 1].powi(2) + x[3 * i + 2].powi(2)).sqrt();
                assert_relative_eq!(d.radius(i), r, max_relative = 1e-15);
                for j in 0..4 {
                    let rij = (0..3)
                        .map(|k| (x[3 * i + k] - x[3 * j + k]).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    assert_relative_eq!(d.pair(i, j), rij, max_relative = 1e-15);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_configurations() {
        assert!(ElectronConfiguration::new(vec![], vec![], 1).is_err());
        assert!(ElectronConfiguration::new(vec![Vec3::new(f64::NAN, 0.0, 0.0)], vec![Spin::Up], 1).is_err());
        assert!(ElectronConfiguration::new(vec![Vec3::zeros()], vec![Spin::Up, Spin::Down], 1).is_err());
    }

    #[test]
    fn transposition_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_config(&mut rng, &BE);
        let p12 = SpinPermutation::transposition(4, 0, 1).unwrap();
        let once = apply_permutation(&c, &p12).unwrap();
        assert_eq!(once.position(0), c.position(1));
        assert_eq!(once.position(1), c.position(0));
        assert_eq!(apply_permutation(&once, &p12).unwrap(), c);
    }

    #[test]
    fn parities() {
        let p12 = SpinPermutation::transposition(4, 0, 1).unwrap();
        let p34 = SpinPermutation::transposition(4, 2, 3).unwrap();
        assert_eq!(p12.parity(), -1);
        assert_eq!(p12.compose(&p34).parity(), 1);
        assert_eq!(SpinPermutation::new(vec![1, 2, 0]).unwrap().parity(), 1);
        assert_eq!(SpinPermutation::new(vec![1, 0, 3, 2]).unwrap().parity(), 1);
        assert!(SpinPermutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn rejects_spin_mixing() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_config(&mut rng, &BE);
        let p13 = SpinPermutation::transposition(4, 0, 2).unwrap();
        assert!(matches!(
            apply_permutation(&c, &p13),
            Err(Error::SpinMixingPermutation { .. })
        ));
    }

    #[test]
    fn enumerates_spin_preserving_group() {
        let perms = spin_preserving_permutations(&BE);
        assert_eq!(perms.len(), 4);
        assert!(perms[0].is_identity());
        assert_eq!(perms.iter().filter(|p| p.parity() == 1).count(), 2);
        for p in &perms {
            p.check_spins(&BE).unwrap();
        }
        let li = [Spin::Up, Spin::Down, Spin::Up];
        assert_eq!(spin_preserving_permutations(&li).len(), 2);
    }

    #[test]
    fn rotation_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = random_config(&mut rng, &BE);
        let axis = Vec3::new(1.0, 2.0, -0.5).normalize();
        assert_eq!(rotate_all(&c, &axis, 0.0).unwrap().max_coordinate_difference(&c), 0.0);
        let full = rotate_all(&c, &axis, 2.0 * std::f64::consts::PI).unwrap();
        assert!(full.max_coordinate_difference(&c) < 1e-12);
        assert!(matches!(
            rotate_all(&c, &Vec3::new(1.0, 1.0, 0.0), 1.0),
            Err(Error::NonUnitAxis(_))
        ));
    }

    #[test]
    fn reference_point_flags() {
        let p = make_be_reference_point(Vec3::x(), Vec3::y()).unwrap();
        assert!(p.perpendicular);
        assert!(!p.parallel);

        let p = make_be_reference_point(Vec3::x(), Vec3::new(1.0, 1.0, 0.0) / 2f64.sqrt()).unwrap();
        assert!(!p.perpendicular);
        assert!((p.axis - Vec3::z()).norm() < 1e-15);

        let r1 = Vec3::new(0.3, -1.2, 0.7);
        let p = make_be_reference_point(r1, -2.0 * r1).unwrap();
        assert!(p.parallel);
        assert!(p.axis.dot(&r1).abs() < 1e-12);
        assert!((p.axis.norm() - 1.0).abs() < 1e-12);

        assert!(matches!(
            make_be_reference_point(Vec3::zeros(), Vec3::x()),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn half_turn_maps_reference_to_double_exchange() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p12p34 = SpinPermutation::new(vec![1, 0, 3, 2]).unwrap();
        for _ in 0..200 {
            let r1 = Vec3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let r3 = if rng.gen_bool(0.1) {
                r1 * rng.gen_range(-2.0..2.0)
            } else {
                Vec3::new(
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                )
            };
            let p = make_be_reference_point(r1, r3).unwrap();
            let end = p.rotation_path().at(1.0);
            let image = apply_permutation(&p.config, &p12p34).unwrap();
            assert!(end.max_coordinate_difference(&image) < 1e-10);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vec3() -> impl Strategy<Value = Vec3> {
            (-4.0..4.0f64, -4.0..4.0f64, -4.0..4.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
        }

        proptest! {
            #[test]
            fn rotation_preserves_distances(
                a in vec3(), b in vec3(), c in vec3(), d in vec3(),
                axis in vec3().prop_filter("non-zero", |v| v.norm() > 1e-3),
                angle in -7.0..7.0f64,
            ) {
                let cfg = ElectronConfiguration::new(vec![a, b, c, d], BE.to_vec(), 4).unwrap();
                let rotated = rotate_all(&cfg, &axis.normalize(), angle).unwrap();
                let (d0, d1) = (cfg.distances(), rotated.distances());
                for i in 0..4 {
                    prop_assert!((d0.radius(i) - d1.radius(i)).abs() <= 1e-12 * d0.radius(i).max(1.0));
                    for j in 0..4 {
                        prop_assert!((d0.pair(i, j) - d1.pair(i, j)).abs() <= 1e-12 * d0.pair(i, j).max(1.0));
                    }
                }
            }

            #[test]
            fn permutation_preserves_positions_and_spins(
                a in vec3(), b in vec3(), c in vec3(), d in vec3(), k in 0usize..4,
            ) {
                let cfg = ElectronConfiguration::new(vec![a, b, c, d], BE.to_vec(), 4).unwrap();
                let perm = &spin_preserving_permutations(&BE)[k];
                let out = apply_permutation(&cfg, perm).unwrap();
                prop_assert_eq!(out.spins(), cfg.spins());
                let key = |p: &Vec3| (p.x.to_bits(), p.y.to_bits(), p.z.to_bits());
                let mut before: Vec<_> = cfg.positions().iter().map(key).collect();
                let mut after: Vec<_> = out.positions().iter().map(key).collect();
                before.sort();
                after.sort();
                prop_assert_eq!(before, after);
            }
        }
    }
}
