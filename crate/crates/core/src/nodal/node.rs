//! Sign-defining node functions.

use std::fmt;
use std::sync::Arc;

use crate::configuration::{ElectronConfiguration, Spin, Vec3};
use crate::error::{Error, Result};
use crate::wavefunction::{local_scale, Derivatives, TrialWaveFunction, ZERO_RELATIVE_TOLERANCE};

const TRIPLET_SPINS: [Spin; 2] = [Spin::Up, Spin::Up];
const LITHIUM_SPINS: [Spin; 3] = [Spin::Up, Spin::Down, Spin::Up];
const BERYLLIUM_SPINS: [Spin; 4] = [Spin::Up, Spin::Up, Spin::Down, Spin::Down];

#[derive(Clone)]
pub enum NodeFunction {
    /// `r1 − r2` for two like-spin electrons.
    ExactTriplet,
    /// `r1 − r3` for the (up, down, up) lithium layout.
    LiRhf,
    /// `(r1 − r2)(r3 − r4)` for the (up, up, down, down) beryllium layout.
    Product,
    /// `(r1 − r2)(r3 − r4) + a r12·r34` with `r12 = r1 − r2`, `r34 = r3 − r4`
    /// as vectors.
    ConjecturedBe { a: f64 },
    /// Sign of a trial function.
    WaveFunctionSign(Arc<dyn TrialWaveFunction>),
}

impl fmt::Debug for NodeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl NodeFunction {
    pub fn label(&self) -> String {
        match self {
            NodeFunction::ExactTriplet => "r1-r2".into(),
            NodeFunction::LiRhf => "r1-r3".into(),
            NodeFunction::Product => "(r1-r2)(r3-r4)".into(),
            NodeFunction::ConjecturedBe { a } => format!("(r1-r2)(r3-r4)+{a}*r12.r34"),
            NodeFunction::WaveFunctionSign(wf) => format!("sign({})", wf.label()),
        }
    }

    /// Electron layout the node is defined on.
    pub fn spins(&self) -> &[Spin] {
        match self {
            NodeFunction::ExactTriplet => &TRIPLET_SPINS,
            NodeFunction::LiRhf => &LITHIUM_SPINS,
            NodeFunction::Product | NodeFunction::ConjecturedBe { .. } => &BERYLLIUM_SPINS,
            NodeFunction::WaveFunctionSign(wf) => wf.spins(),
        }
    }

    pub fn check_layout(&self, config: &ElectronConfiguration) -> Result<()> {
        if config.spins() != self.spins() {
            return Err(Error::LayoutMismatch {
                expected: format!("{:?}", self.spins()),
                actual: format!("{:?}", config.spins()),
            });
        }
        Ok(())
    }

    /// Like-spin pairs whose exchange flips the sign.
    pub fn antisymmetric_pairs(&self) -> Vec<(usize, usize)> {
        match self {
            NodeFunction::ExactTriplet => vec![(0, 1)],
            NodeFunction::LiRhf => vec![(0, 2)],
            NodeFunction::Product | NodeFunction::ConjecturedBe { .. } => vec![(0, 1), (2, 3)],
            NodeFunction::WaveFunctionSign(wf) => {
                let s = wf.spins();
                let mut out = Vec::new();
                for i in 0..s.len() {
                    for j in i + 1..s.len() {
                        if s[i] == s[j] {
                            out.push((i, j));
                        }
                    }
                }
                out
            }
        }
    }

    /// Radial difference `r_i − r_j` that defines the node, where there is one.
    pub fn radial_coordinate(&self) -> Option<(usize, usize)> {
        match self {
            NodeFunction::ExactTriplet => Some((0, 1)),
            NodeFunction::LiRhf => Some((0, 2)),
            _ => None,
        }
    }

    /// Node value without layout checks.
    pub fn value_unchecked(&self, config: &ElectronConfiguration) -> f64 {
        let p = config.positions();
        match self {
            NodeFunction::ExactTriplet => p[0].norm() - p[1].norm(),
            NodeFunction::LiRhf => p[0].norm() - p[2].norm(),
            NodeFunction::Product => product(p),
            NodeFunction::ConjecturedBe { a } => {
                // a = 0 must reproduce the product node bit for bit (including -0.0)
                if *a == 0.0 {
                    product(p)
                } else {
                    product(p) + a * (p[0] - p[1]).dot(&(p[2] - p[3]))
                }
            }
            NodeFunction::WaveFunctionSign(wf) => wf.value_unchecked(config),
        }
    }

    pub fn value(&self, config: &ElectronConfiguration) -> Result<f64> {
        self.check_layout(config)?;
        Ok(self.value_unchecked(config))
    }

    /// Value, gradient and Laplacian.
    pub fn derivatives_unchecked(&self, config: &ElectronConfiguration) -> Derivatives {
        let p = config.positions();
        let n = p.len();
        let mut d = Derivatives::zero(n);
        match self {
            NodeFunction::ExactTriplet => radial_difference(p, 0, 1, &mut d),
            NodeFunction::LiRhf => radial_difference(p, 0, 2, &mut d),
            NodeFunction::Product => product_derivatives(p, &mut d),
            NodeFunction::ConjecturedBe { a } => {
                product_derivatives(p, &mut d);
                if *a != 0.0 {
                    let u = p[0] - p[1];
                    let w = p[2] - p[3];
                    d.value += a * u.dot(&w);
                    d.gradient[0] += w * *a;
                    d.gradient[1] -= w * *a;
                    d.gradient[2] += u * *a;
                    d.gradient[3] -= u * *a;
                }
            }
            NodeFunction::WaveFunctionSign(wf) => return wf.derivatives_unchecked(config),
        }
        d
    }

    /// True for nodes invariant under rotating all electrons together.
    pub fn is_rotation_invariant(&self) -> bool {
        match self {
            NodeFunction::WaveFunctionSign(wf) => wf.is_s_state(),
            _ => true,
        }
    }
}

fn product(p: &[Vec3]) -> f64 {
    (p[0].norm() - p[1].norm()) * (p[2].norm() - p[3].norm())
}

fn unit(v: &Vec3) -> (Vec3, f64) {
    let r = v.norm();
    if r > 0.0 {
        (v / r, r)
    } else {
        (Vec3::zeros(), r)
    }
}

fn radial_difference(p: &[Vec3], i: usize, j: usize, d: &mut Derivatives) {
    let (ui, ri) = unit(&p[i]);
    let (uj, rj) = unit(&p[j]);
    d.value = ri - rj;
    d.gradient[i] = ui;
    d.gradient[j] = -uj;
    d.laplacian = 2.0 / ri - 2.0 / rj;
}

fn product_derivatives(p: &[Vec3], d: &mut Derivatives) {
    let (u1, r1) = unit(&p[0]);
    let (u2, r2) = unit(&p[1]);
    let (u3, r3) = unit(&p[2]);
    let (u4, r4) = unit(&p[3]);
    let a = r1 - r2;
    let b = r3 - r4;
    d.value = a * b;
    d.gradient[0] = u1 * b;
    d.gradient[1] = -u2 * b;
    d.gradient[2] = u3 * a;
    d.gradient[3] = -u4 * a;
    d.laplacian = b * (2.0 / r1 - 2.0 / r2) + a * (2.0 / r3 - 2.0 / r4);
}

/// Sign of the node at `config`: 0 when `|N| <= 1e-10 ×` the largest `|N|`
/// over the 0.1-bohr probe ball.
pub fn node_sign(node: &NodeFunction, config: &ElectronConfiguration) -> Result<i8> {
    node.check_layout(config)?;
    let v = node.value_unchecked(config);
    if v.abs() <= ZERO_RELATIVE_TOLERANCE * local_scale(|c| node.value_unchecked(c), config) {
        return Ok(0);
    }
    Ok(if v > 0.0 { 1 } else { -1 })
}
