//! Symmetric positive correlation factor `e^U` with
//! `U = Σ_{i<j} a_ij r_ij / (1 + b_ij r_ij)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::configuration::{ElectronConfiguration, Spin, Vec3};
use crate::error::{Error, Result};

use super::{Derivatives, TrialWaveFunction};

/// Pair parameters; the cusp values are `a = 1/2` for antiparallel and
/// `a = 1/4` for parallel spins.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JastrowFactor {
    pub a_antiparallel: f64,
    pub b_antiparallel: f64,
    pub a_parallel: f64,
    pub b_parallel: f64,
}

impl JastrowFactor {
    /// Cusp-satisfying factor with the given decay parameters.
    pub fn cusp(b_parallel: f64, b_antiparallel: f64) -> Result<Self> {
        Self::new(0.5, b_antiparallel, 0.25, b_parallel)
    }

    pub fn new(a_antiparallel: f64, b_antiparallel: f64, a_parallel: f64, b_parallel: f64) -> Result<Self> {
        let j = Self {
            a_antiparallel,
            b_antiparallel,
            a_parallel,
            b_parallel,
        };
        j.validate()?;
        Ok(j)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.a_antiparallel,
            self.b_antiparallel,
            self.a_parallel,
            self.b_parallel,
        ];
        if all.iter().any(|x| !x.is_finite()) || self.b_antiparallel < 0.0 || self.b_parallel < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Jastrow parameters must be finite with b >= 0: {self:?}"
            )));
        }
        Ok(())
    }

    fn pair(&self, si: Spin, sj: Spin) -> (f64, f64) {
        if si == sj {
            (self.a_parallel, self.b_parallel)
        } else {
            (self.a_antiparallel, self.b_antiparallel)
        }
    }

    /// `U(R)`.
    pub fn exponent(&self, config: &ElectronConfiguration) -> f64 {
        let p = config.positions();
        let s = config.spins();
        let mut u = 0.0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                let (a, b) = self.pair(s[i], s[j]);
                let r = (p[i] - p[j]).norm();
                u += a * r / (1.0 + b * r);
            }
        }
        u
    }

    /// `U`, `∇ᵢU` and `Σᵢ∇ᵢ²U`.
    pub fn exponent_derivatives(&self, config: &ElectronConfiguration) -> (f64, Vec<Vec3>, f64) {
        let p = config.positions();
        let s = config.spins();
        let mut u = 0.0;
        let mut grad = vec![Vec3::zeros(); p.len()];
        let mut lap = 0.0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                let (a, b) = self.pair(s[i], s[j]);
                let v = p[i] - p[j];
                let r = v.norm();
                let q = 1.0 + b * r;
                u += a * r / q;
                let d1 = a / (q * q);
                let d2 = -2.0 * a * b / (q * q * q);
                if r > 0.0 {
                    let g = v * (d1 / r);
                    grad[i] += g;
                    grad[j] -= g;
                    lap += 2.0 * (d2 + 2.0 * d1 / r);
                }
            }
        }
        (u, grad, lap)
    }
}

/// `Φ e^U`; same sign and zero set as `Φ`.
#[derive(Clone, Debug)]
pub struct JastrowWaveFunction {
    base: Arc<dyn TrialWaveFunction>,
    jastrow: JastrowFactor,
}

impl JastrowWaveFunction {
    pub fn new(base: Arc<dyn TrialWaveFunction>, jastrow: JastrowFactor) -> Result<Self> {
        jastrow.validate()?;
        Ok(Self { base, jastrow })
    }

    pub fn base(&self) -> &Arc<dyn TrialWaveFunction> {
        &self.base
    }

    pub fn jastrow(&self) -> &JastrowFactor {
        &self.jastrow
    }
}

impl TrialWaveFunction for JastrowWaveFunction {
    fn spins(&self) -> &[Spin] {
        self.base.spins()
    }

    fn value_unchecked(&self, config: &ElectronConfiguration) -> f64 {
        self.base.value_unchecked(config) * self.jastrow.exponent(config).exp()
    }

    fn derivatives_unchecked(&self, config: &ElectronConfiguration) -> Derivatives {
        let phi = self.base.derivatives_unchecked(config);
        let (u, gu, lu) = self.jastrow.exponent_derivatives(config);
        let j = u.exp();
        // ∇(ΦJ) = J(∇Φ + Φ∇U); ∇²(ΦJ) = J(∇²Φ + 2∇Φ·∇U + Φ(∇²U + |∇U|²))
        let mut out = Derivatives::zero(phi.gradient.len());
        out.value = phi.value * j;
        let mut cross = 0.0;
        let mut gu2 = 0.0;
        for (k, (gp, g)) in phi.gradient.iter().zip(&gu).enumerate() {
            out.gradient[k] = (gp + g * phi.value) * j;
            cross += gp.dot(g);
            gu2 += g.norm_squared();
        }
        out.laplacian = j * (phi.laplacian + 2.0 * cross + phi.value * (lu + gu2));
        out
    }

    fn is_s_state(&self) -> bool {
        self.base.is_s_state()
    }

    fn label(&self) -> String {
        format!("{} x Jastrow", self.base.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::{apply_permutation, SpinPermutation};
    use crate::wavefunction::{build_be_two_config, build_li_rhf, finite_difference_derivatives, BeOrbitalExponents};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rv(rng: &mut impl Rng) -> Vec3 {
        Vec3::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    }

    fn be_jastrow() -> JastrowWaveFunction {
        let base = Arc::new(build_be_two_config(0.1, &BeOrbitalExponents::default()).unwrap());
        JastrowWaveFunction::new(base, JastrowFactor::cusp(1.2, 0.8).unwrap()).unwrap()
    }

    #[test]
    fn sign_and_symmetry_are_preserved() {
        let wf = be_jastrow();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p12 = SpinPermutation::transposition(4, 0, 1).unwrap();
        for _ in 0..1000 {
            let c = ElectronConfiguration::new((0..4).map(|_| rv(&mut rng)).collect(), wf.spins().to_vec(), 4).unwrap();
            let v = wf.value_unchecked(&c);
            let b = wf.base().value_unchecked(&c);
            assert_eq!(v.signum(), b.signum());
            let pv = wf.value_unchecked(&apply_permutation(&c, &p12).unwrap());
            assert!((pv + v).abs() <= 1e-12 * v.abs());
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let base = Arc::new(build_li_rhf(2.7, 0.65).unwrap());
        let li = JastrowWaveFunction::new(base, JastrowFactor::cusp(1.0, 1.5).unwrap()).unwrap();
        let be = be_jastrow();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let wfs: [&dyn TrialWaveFunction; 2] = [&li, &be];
        for wf in wfs {
            for _ in 0..30 {
                let n = wf.spins().len();
                let c =
                    ElectronConfiguration::new((0..n).map(|_| rv(&mut rng)).collect(), wf.spins().to_vec(), 3).unwrap();
                let a = wf.derivatives_unchecked(&c);
                let f = finite_difference_derivatives(wf, &c, 1e-4);
                let gscale = a.gradient.iter().map(|g| g.amax()).fold(0.0, f64::max);
                for (ga, gf) in a.gradient.iter().zip(&f.gradient) {
                    assert!((ga - gf).amax() <= 1e-6 * gscale);
                }
                assert!((a.laplacian - f.laplacian).abs() <= 1e-6 * a.laplacian.abs().max(gscale));
            }
        }
    }

    #[test]
    fn jastrow_gradient_is_smooth_across_a_base_node() {
        // the exponent does not see the determinant, so ∇U is continuous at r1 = r3
        let j = JastrowFactor::cusp(1.0, 1.0).unwrap();
        let spins = vec![Spin::Up, Spin::Down, Spin::Up];
        let at = |r3: f64| {
            let c = ElectronConfiguration::new(
                vec![
                    Vec3::new(1.0, 0.0, 0.0),
                    Vec3::new(0.0, 0.7, 0.2),
                    Vec3::new(0.0, 0.0, r3),
                ],
                spins.clone(),
                3,
            )
            .unwrap();
            j.exponent_derivatives(&c).1
        };
        let (lo, hi) = (at(1.0 - 1e-9), at(1.0 + 1e-9));
        for (a, b) in lo.iter().zip(&hi) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn rejects_negative_b() {
        assert!(JastrowFactor::cusp(-1.0, 1.0).is_err());
    }
}
