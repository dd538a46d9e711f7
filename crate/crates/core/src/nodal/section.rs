//! Two-dimensional cross-sections through configuration space.
//!
//! Electrons sit on fixed rays from the nucleus; `t1` and `t2` move radial
//! pairs symmetrically about midpoint radii, everything else is frozen.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configuration::{ElectronConfiguration, Spin, Vec3};
use crate::error::{Error, Result};
use crate::wavefunction::{check_layout, is_zero, TrialWaveFunction};

pub const MIN_RESOLUTION: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case", deny_unknown_fields)]
pub enum SectionLayout {
    /// Four electrons (up, up, down, down) on `rays`;
    /// `r1,2 = rho12 ± t1/2`, `r3,4 = rho34 ± t2/2`.
    Beryllium {
        rays: [[f64; 3]; 4],
        rho12: f64,
        rho34: f64,
    },
    /// Two like-spin electrons, `r1,2 = rho ± t1/2` and `r12 = r12_mid + t2`.
    HeTriplet { rho: f64, r12_mid: f64 },
}

impl SectionLayout {
    /// Beryllium layout with random unit rays and midpoints in [0.5, 2.5) bohr.
    pub fn random_beryllium(rng: &mut impl Rng) -> Self {
        let mut rays = [[0.0; 3]; 4];
        for ray in &mut rays {
            let v = loop {
                let v = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                let n = v.norm();
                if n > 0.1 && n <= 1.0 {
                    break v / n;
                }
            };
            *ray = [v.x, v.y, v.z];
        }
        SectionLayout::Beryllium {
            rays,
            rho12: rng.gen_range(0.5..2.5),
            rho34: rng.gen_range(0.5..2.5),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SectionLayout::Beryllium { rays, rho12, rho34 } => {
                for r in rays {
                    let v = Vec3::from(*r);
                    if !(v.norm() > 0.0) || !v.iter().all(|x| x.is_finite()) {
                        return Err(Error::InvalidParameter(format!(
                            "section ray {r:?} must be a finite non-zero vector"
                        )));
                    }
                }
                if !(*rho12 > 0.0 && *rho34 > 0.0) {
                    return Err(Error::InvalidParameter("midpoint radii must be positive".into()));
                }
            }
            SectionLayout::HeTriplet { rho, r12_mid } => {
                if !(*rho > 0.0 && *r12_mid > 0.0) {
                    return Err(Error::InvalidParameter("rho and r12_mid must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossSectionSpec {
    #[serde(flatten)]
    pub layout: SectionLayout,
    /// Grid covers `t1 ∈ [-t1_max, t1_max]`.
    pub t1_max: f64,
    pub t2_max: f64,
    pub n1: usize,
    pub n2: usize,
}

impl CrossSectionSpec {
    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        if self.n1 < MIN_RESOLUTION || self.n2 < MIN_RESOLUTION {
            return Err(Error::InvalidParameter(format!(
                "resolution must be at least {MIN_RESOLUTION} per axis, got {}x{}",
                self.n1, self.n2
            )));
        }
        if !(self.t1_max > 0.0 && self.t2_max > 0.0 && self.t1_max.is_finite() && self.t2_max.is_finite()) {
            return Err(Error::InvalidParameter(
                "grid half-widths must be positive and finite".into(),
            ));
        }
        Ok(())
    }

    pub fn t1(&self, i: usize) -> f64 {
        axis(self.t1_max, self.n1, i)
    }

    pub fn t2(&self, j: usize) -> f64 {
        axis(self.t2_max, self.n2, j)
    }

    pub fn spins(&self) -> Vec<Spin> {
        match self.layout {
            SectionLayout::Beryllium { .. } => vec![Spin::Up, Spin::Up, Spin::Down, Spin::Down],
            SectionLayout::HeTriplet { .. } => vec![Spin::Up, Spin::Up],
        }
    }

    /// The configuration at `(t1, t2)`, or `None` when it is not realizable
    /// (negative radius, impossible triangle).
    pub fn config_at(&self, t1: f64, t2: f64) -> Option<ElectronConfiguration> {
        match &self.layout {
            SectionLayout::Beryllium { rays, rho12, rho34 } => {
                let radii = [rho12 + 0.5 * t1, rho12 - 0.5 * t1, rho34 + 0.5 * t2, rho34 - 0.5 * t2];
                if radii.iter().any(|&r| r < 0.0) {
                    return None;
                }
                let positions = rays
                    .iter()
                    .zip(radii)
                    .map(|(u, r)| Vec3::from(*u).normalize() * r)
                    .collect();
                ElectronConfiguration::new(positions, self.spins(), 4).ok()
            }
            SectionLayout::HeTriplet { rho, r12_mid } => {
                let (r1, r2, r12) = (rho + 0.5 * t1, rho - 0.5 * t1, r12_mid + t2);
                if r1 <= 0.0 || r2 <= 0.0 || r12 < 0.0 {
                    return None;
                }
                let cos = (r1 * r1 + r2 * r2 - r12 * r12) / (2.0 * r1 * r2);
                if !(-1.0..=1.0).contains(&cos) {
                    return None;
                }
                let sin = (1.0 - cos * cos).max(0.0).sqrt();
                let positions = vec![Vec3::new(r1, 0.0, 0.0), Vec3::new(r2 * cos, r2 * sin, 0.0)];
                ElectronConfiguration::new(positions, self.spins(), 2).ok()
            }
        }
    }
}

fn axis(max: f64, n: usize, i: usize) -> f64 {
    -max + 2.0 * max * i as f64 / (n - 1) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub t1: f64,
    pub t2: f64,
    /// +1, −1, or 0 on the zero set and at infeasible points.
    pub sign: i8,
    /// NaN at infeasible points.
    pub value: f64,
}

/// Row-major grid: `t2` indexes rows, `t1` columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionGrid {
    pub n1: usize,
    pub n2: usize,
    pub points: Vec<GridPoint>,
}

impl SectionGrid {
    pub fn at(&self, i1: usize, i2: usize) -> &GridPoint {
        &self.points[i2 * self.n1 + i1]
    }

    /// `t1,t2,sign,value` with 17 significant digits for the value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t1,t2,sign,value")?;
        for p in &self.points {
            writeln!(out, "{},{},{},{:.16e}", p.t1, p.t2, p.sign, p.value)?;
        }
        Ok(())
    }

    /// 4-connected components of equal non-zero sign; `None` for zero cells.
    pub fn sign_components(&self) -> Vec<Option<usize>> {
        let mut label = vec![None; self.points.len()];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..self.points.len() {
            if label[start].is_some() || self.points[start].sign == 0 {
                continue;
            }
            let s = self.points[start].sign;
            label[start] = Some(next);
            stack.push(start);
            while let Some(k) = stack.pop() {
                let (i1, i2) = (k % self.n1, k / self.n1);
                let mut neighbours = Vec::with_capacity(4);
                if i1 > 0 {
                    neighbours.push(k - 1);
                }
                if i1 + 1 < self.n1 {
                    neighbours.push(k + 1);
                }
                if i2 > 0 {
                    neighbours.push(k - self.n1);
                }
                if i2 + 1 < self.n2 {
                    neighbours.push(k + self.n1);
                }
                for m in neighbours {
                    if label[m].is_none() && self.points[m].sign == s {
                        label[m] = Some(next);
                        stack.push(m);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Whether the diagonally opposite quadrant cells next to the origin are
    /// joined through same-sign cells: `(Q1 with Q3, Q2 with Q4)`.
    pub fn origin_quadrants_connected(&self, spec: &CrossSectionSpec) -> (bool, bool) {
        let labels = self.sign_components();
        let pos1 = (0..self.n1).find(|&i| spec.t1(i) > 0.0).unwrap_or(self.n1 - 1);
        let neg1 = (0..self.n1).rev().find(|&i| spec.t1(i) < 0.0).unwrap_or(0);
        let pos2 = (0..self.n2).find(|&j| spec.t2(j) > 0.0).unwrap_or(self.n2 - 1);
        let neg2 = (0..self.n2).rev().find(|&j| spec.t2(j) < 0.0).unwrap_or(0);
        let l = |i1: usize, i2: usize| labels[i2 * self.n1 + i1];
        let same = |a: Option<usize>, b: Option<usize>| a.is_some() && a == b;
        (same(l(pos1, pos2), l(neg1, neg2)), same(l(neg1, pos2), l(pos1, neg2)))
    }
}

/// Sign and value of `wf` on the grid; rows are evaluated in parallel.
pub fn scan_cross_section(wf: &dyn TrialWaveFunction, spec: &CrossSectionSpec) -> Result<SectionGrid> {
    spec.validate()?;
    let probe = spec
        .config_at(0.0, 0.0)
        .ok_or_else(|| Error::InvalidParameter("the grid centre is not a valid configuration".into()))?;
    check_layout(wf, &probe)?;
    let rows: Vec<Vec<GridPoint>> = (0..spec.n2)
        .into_par_iter()
        .map(|j| {
            let t2 = spec.t2(j);
            (0..spec.n1)
                .map(|i| {
                    let t1 = spec.t1(i);
                    match spec.config_at(t1, t2) {
                        None => GridPoint {
                            t1,
                            t2,
                            sign: 0,
                            value: f64::NAN,
                        },
                        Some(c) => {
                            let value = wf.value_unchecked(&c);
                            let sign = if is_zero(wf, &c) {
                                0
                            } else if value > 0.0 {
                                1
                            } else {
                                -1
                            };
                            GridPoint { t1, t2, sign, value }
                        }
                    }
                })
                .collect()
        })
        .collect();
    Ok(SectionGrid {
        n1: spec.n1,
        n2: spec.n2,
        points: rows.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunction::{build_be_hf, build_he_triplet_hylleraas, BeOrbitalExponents};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn be_spec(layout: SectionLayout) -> CrossSectionSpec {
        CrossSectionSpec {
            layout,
            t1_max: 0.8,
            t2_max: 0.8,
            n1: 17,
            n2: 17,
        }
    }

    #[test]
    fn hartree_fock_checkerboard_for_random_remainders() {
        let wf = build_be_hf(&BeOrbitalExponents::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let spec = be_spec(SectionLayout::random_beryllium(&mut rng));
            let grid = scan_cross_section(&wf, &spec).unwrap();
            for p in &grid.points {
                if p.value.is_nan() {
                    continue;
                }
                let expected = (p.t1 * p.t2).signum() as i8 * i8::from(p.t1 != 0.0 && p.t2 != 0.0);
                assert_eq!(p.sign, expected, "{p:?}");
            }
            assert_eq!(grid.origin_quadrants_connected(&spec), (false, false));
        }
    }

    #[test]
    fn he_triplet_zero_line_is_independent_of_r12() {
        let wf = build_he_triplet_hylleraas(3, 1.1).unwrap();
        let spec = CrossSectionSpec {
            layout: SectionLayout::HeTriplet { rho: 1.5, r12_mid: 1.5 },
            t1_max: 1.0,
            t2_max: 1.0,
            n1: 21,
            n2: 21,
        };
        let grid = scan_cross_section(&wf, &spec).unwrap();
        for p in grid.points.iter().filter(|p| !p.value.is_nan()) {
            assert_eq!(p.sign == 0, p.t1 == 0.0, "{p:?}");
        }
    }

    #[test]
    fn csv_layout_and_validation() {
        let wf = build_be_hf(&BeOrbitalExponents::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let mut spec = be_spec(SectionLayout::random_beryllium(&mut rng));
        let grid = scan_cross_section(&wf, &spec).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("t1,t2,sign,value"));
        assert_eq!(text.lines().count(), 1 + 17 * 17);
        let value = text.lines().nth(1).unwrap().split(',').nth(3).unwrap();
        assert_eq!(value.split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
        spec.n1 = 1;
        assert!(scan_cross_section(&wf, &spec).is_err());
    }

    #[test]
    fn flood_fill_separates_quadrants() {
        let mut points = Vec::new();
        let spec = CrossSectionSpec {
            layout: SectionLayout::HeTriplet { rho: 1.0, r12_mid: 1.0 },
            t1_max: 1.0,
            t2_max: 1.0,
            n1: 17,
            n2: 17,
        };
        for j in 0..17 {
            for i in 0..17 {
                let (t1, t2) = (spec.t1(i), spec.t2(j));
                // hyperbola t1 t2 = -0.002 opens the + quadrants into each other
                let v = t1 * t2 + 0.002;
                points.push(GridPoint {
                    t1,
                    t2,
                    sign: v.signum() as i8,
                    value: v,
                });
            }
        }
        let grid = SectionGrid { n1: 17, n2: 17, points };
        assert_eq!(grid.origin_quadrants_connected(&spec), (true, false));
    }
}
