//! Guiding functions whose zero set is exactly a prescribed node.

use crate::configuration::{ElectronConfiguration, Spin, Vec3};
use crate::error::{Error, Result};
use crate::wavefunction::{Derivatives, JastrowFactor, TrialWaveFunction};

use super::node::NodeFunction;

/// `Ψ_G = N(R) Π_pairs S(r_i, r_j) e^U` with
/// `S(x, y) = e^{-ζa x - ζb y} + e^{-ζb x - ζa y}` over the like-spin pairs
/// and an optional Jastrow exponent `U`. The envelope is positive and
/// symmetric, so the zero set of `Ψ_G` is that of `N`.
#[derive(Clone, Debug)]
pub struct NodeEnvelopeGuide {
    node: NodeFunction,
    pairs: Vec<(usize, usize)>,
    zeta_inner: f64,
    zeta_outer: f64,
    jastrow: Option<JastrowFactor>,
}

impl NodeEnvelopeGuide {
    pub fn new(
        node: NodeFunction,
        pairs: Vec<(usize, usize)>,
        zeta_inner: f64,
        zeta_outer: f64,
        jastrow: Option<JastrowFactor>,
    ) -> Result<Self> {
        if !(zeta_inner > 0.0 && zeta_outer > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "envelope exponents must be positive: {zeta_inner}, {zeta_outer}"
            )));
        }
        let n = node.spins().len();
        let mut seen = vec![false; n];
        for &(i, j) in &pairs {
            if i >= n || j >= n || i == j || seen[i] || seen[j] {
                return Err(Error::InvalidParameter(format!("invalid envelope pairs {pairs:?}")));
            }
            seen[i] = true;
            seen[j] = true;
        }
        if let Some(j) = &jastrow {
            j.validate()?;
        }
        Ok(Self {
            node,
            pairs,
            zeta_inner,
            zeta_outer,
            jastrow,
        })
    }

    /// Beryllium guide for the `(r1,r2)`, `(r3,r4)` pair layout.
    pub fn beryllium(
        node: NodeFunction,
        zeta_inner: f64,
        zeta_outer: f64,
        jastrow: Option<JastrowFactor>,
    ) -> Result<Self> {
        Self::new(node, vec![(0, 1), (2, 3)], zeta_inner, zeta_outer, jastrow)
    }

    pub fn node(&self) -> &NodeFunction {
        &self.node
    }

    /// `log W`, `∇ log W` and `∇² log W` of the positive factor `W`.
    fn log_envelope(&self, config: &ElectronConfiguration) -> (f64, Vec<Vec3>, f64) {
        let p = config.positions();
        let (mut u, mut grad, mut lap) = match &self.jastrow {
            Some(j) => j.exponent_derivatives(config),
            None => (0.0, vec![Vec3::zeros(); p.len()], 0.0),
        };
        let (za, zb) = (self.zeta_inner, self.zeta_outer);
        for &(i, j) in &self.pairs {
            let (x, y) = (p[i].norm(), p[j].norm());
            // factor out the larger exponential to avoid underflow
            let (e1, e2) = {
                let a1 = -za * x - zb * y;
                let a2 = -zb * x - za * y;
                let m = a1.max(a2);
                u += m;
                ((a1 - m).exp(), (a2 - m).exp())
            };
            let s = e1 + e2;
            u += s.ln();
            let sx = (-za * e1 - zb * e2) / s;
            let sy = (-zb * e1 - za * e2) / s;
            let sxx = (za * za * e1 + zb * zb * e2) / s;
            let syy = (zb * zb * e1 + za * za * e2) / s;
            if x > 0.0 {
                grad[i] += p[i] * (sx / x);
                lap += sxx + 2.0 * sx / x - sx * sx;
            }
            if y > 0.0 {
                grad[j] += p[j] * (sy / y);
                lap += syy + 2.0 * sy / y - sy * sy;
            }
        }
        (u, grad, lap)
    }
}

impl TrialWaveFunction for NodeEnvelopeGuide {
    fn spins(&self) -> &[Spin] {
        self.node.spins()
    }

    fn value_unchecked(&self, config: &ElectronConfiguration) -> f64 {
        self.node.value_unchecked(config) * self.log_envelope(config).0.exp()
    }

    fn derivatives_unchecked(&self, config: &ElectronConfiguration) -> Derivatives {
        let nd = self.node.derivatives_unchecked(config);
        let (u, gu, lu) = self.log_envelope(config);
        let w = u.exp();
        let mut out = Derivatives::zero(nd.gradient.len());
        out.value = nd.value * w;
        let mut cross = 0.0;
        let mut gu2 = 0.0;
        for (k, (gn, g)) in nd.gradient.iter().zip(&gu).enumerate() {
            out.gradient[k] = (gn + g * nd.value) * w;
            cross += gn.dot(g);
            gu2 += g.norm_squared();
        }
        out.laplacian = w * (nd.laplacian + 2.0 * cross + nd.value * (lu + gu2));
        out
    }

    fn is_s_state(&self) -> bool {
        self.node.is_rotation_invariant()
    }

    fn label(&self) -> String {
        format!("node envelope guide for {}", self.node.label())
    }
}
