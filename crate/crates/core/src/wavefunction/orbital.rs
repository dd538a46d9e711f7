//! Slater-type atomic orbitals centred on the nucleus.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::configuration::Vec3;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitalKind {
    #[serde(rename = "1s")]
    S1,
    #[serde(rename = "2s")]
    S2,
    #[serde(rename = "2px")]
    Px,
    #[serde(rename = "2py")]
    Py,
    #[serde(rename = "2pz")]
    Pz,
}

impl OrbitalKind {
    /// Cartesian component multiplying the radial part, `None` for s orbitals.
    pub fn p_component(self) -> Option<usize> {
        match self {
            OrbitalKind::S1 | OrbitalKind::S2 => None,
            OrbitalKind::Px => Some(0),
            OrbitalKind::Py => Some(1),
            OrbitalKind::Pz => Some(2),
        }
    }
}

/// One term `c r^n e^{-ζ r}` of a radial function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialTerm {
    pub coefficient: f64,
    pub power: u32,
    pub zeta: f64,
}

/// `R(r) = Σ c r^n e^{-ζ r}` with first and second derivatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialFunction {
    pub terms: Vec<RadialTerm>,
}

impl RadialFunction {
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for t in &self.terms {
            let e = t.coefficient * (-t.zeta * r).exp();
            let z = t.zeta;
            match t.power {
                0 => {
                    v += e;
                    d1 -= z * e;
                    d2 += z * z * e;
                }
                1 => {
                    v += r * e;
                    d1 += (1.0 - z * r) * e;
                    d2 += (z * z * r - 2.0 * z) * e;
                }
                n => {
                    let n = n as i32;
                    let rn2 = r.powi(n - 2);
                    let rn1 = rn2 * r;
                    let rn = rn1 * r;
                    let nf = n as f64;
                    v += rn * e;
                    d1 += (nf * rn1 - z * rn) * e;
                    d2 += (nf * (nf - 1.0) * rn2 - 2.0 * nf * z * rn1 + z * z * rn) * e;
                }
            }
        }
        (v, d1, d2)
    }

    /// `∫ R(r)² r^(2+extra) dr` over `[0, ∞)`, times 4π.
    fn weighted_norm(&self, extra: u32) -> f64 {
        let mut s = 0.0;
        for a in &self.terms {
            for b in &self.terms {
                let n = a.power + b.power + 2 + extra;
                s += a.coefficient * b.coefficient * factorial(n) / (a.zeta + b.zeta).powi(n as i32 + 1);
            }
        }
        4.0 * PI * s
    }

    fn scaled(mut self, k: f64) -> Self {
        for t in &mut self.terms {
            t.coefficient *= k;
        }
        self
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Value, gradient and Laplacian of one orbital at one point.
#[derive(Clone, Copy, Debug, Default)]
pub struct OrbitalValue {
    pub value: f64,
    pub gradient: Vec3,
    pub laplacian: f64,
}

/// An s orbital `R(r)` or a p orbital `x_m g(r)` with `g > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlaterOrbital {
    pub kind: OrbitalKind,
    pub radial: RadialFunction,
}

impl SlaterOrbital {
    /// Normalized `1s = N e^{-ζ r}`.
    pub fn one_s(zeta: f64) -> Result<Self> {
        check_zeta(zeta)?;
        let o = Self {
            kind: OrbitalKind::S1,
            radial: RadialFunction {
                terms: vec![RadialTerm {
                    coefficient: 1.0,
                    power: 0,
                    zeta,
                }],
            },
        };
        Ok(o.normalized())
    }

    /// Normalized 2s built from `r e^{-ζ₂ r}` with its 1s projection removed,
    /// signed so the orbital is positive at the nucleus.
    ///
    /// For `zeta_1s >= zeta_2s` the ratio 2s/1s is strictly decreasing in r,
    /// so a 1s-2s pair determinant vanishes exactly when the two radii agree.
    pub fn two_s(zeta_1s: f64, zeta_2s: f64) -> Result<Self> {
        check_zeta(zeta_1s)?;
        check_zeta(zeta_2s)?;
        let one_s = Self::one_s(zeta_1s)?;
        let n1 = one_s.radial.terms[0].coefficient;
        // <1s | r e^{-ζ₂ r}> = N₁ 4π 3! / (ζ₁+ζ₂)^4
        let lambda = n1 * 4.0 * PI * 6.0 / (zeta_1s + zeta_2s).powi(4);
        let radial = RadialFunction {
            terms: vec![
                RadialTerm {
                    coefficient: lambda * n1,
                    power: 0,
                    zeta: zeta_1s,
                },
                RadialTerm {
                    coefficient: -1.0,
                    power: 1,
                    zeta: zeta_2s,
                },
            ],
        };
        Ok(Self {
            kind: OrbitalKind::S2,
            radial,
        }
        .normalized())
    }

    /// Normalized 2s `(1 − (Z − ζ₂) r) e^{-ζ₂ r}`, which satisfies the
    /// electron-nucleus cusp by itself. Any determinant built from it and a
    /// 1s with `ζ = Z` has the exact cusp; the ratio to such a 1s is strictly
    /// decreasing, so the pair node is again `r_i = r_j`.
    pub fn two_s_cusp(nuclear_charge: f64, zeta_2s: f64) -> Result<Self> {
        check_zeta(zeta_2s)?;
        if !(zeta_2s < nuclear_charge) {
            return Err(Error::InvalidParameter(format!(
                "cusp 2s needs zeta_2s < Z, got {zeta_2s} >= {nuclear_charge}"
            )));
        }
        let radial = RadialFunction {
            terms: vec![
                RadialTerm {
                    coefficient: 1.0,
                    power: 0,
                    zeta: zeta_2s,
                },
                RadialTerm {
                    coefficient: zeta_2s - nuclear_charge,
                    power: 1,
                    zeta: zeta_2s,
                },
            ],
        };
        Ok(Self {
            kind: OrbitalKind::S2,
            radial,
        }
        .normalized())
    }

    /// Normalized `2p_m = N x_m e^{-ζ r}`.
    pub fn two_p(component: usize, zeta: f64) -> Result<Self> {
        check_zeta(zeta)?;
        let kind = match component {
            0 => OrbitalKind::Px,
            1 => OrbitalKind::Py,
            2 => OrbitalKind::Pz,
            _ => return Err(Error::InvalidParameter(format!("p component {component}"))),
        };
        let o = Self {
            kind,
            radial: RadialFunction {
                terms: vec![RadialTerm {
                    coefficient: 1.0,
                    power: 0,
                    zeta,
                }],
            },
        };
        Ok(o.normalized())
    }

    pub fn norm_squared(&self) -> f64 {
        match self.kind.p_component() {
            None => self.radial.weighted_norm(0),
            Some(_) => self.radial.weighted_norm(2) / 3.0,
        }
    }

    pub fn normalized(self) -> Self {
        let k = 1.0 / self.norm_squared().sqrt();
        Self {
            kind: self.kind,
            radial: self.radial.scaled(k),
        }
    }

    pub fn value(&self, r: &Vec3) -> f64 {
        let (v, _, _) = self.radial.eval(r.norm());
        match self.kind.p_component() {
            None => v,
            Some(m) => r[m] * v,
        }
    }

    pub fn evaluate(&self, r: &Vec3) -> OrbitalValue {
        let rn = r.norm();
        let (v, d1, d2) = self.radial.eval(rn);
        let unit = if rn > 0.0 { r / rn } else { Vec3::zeros() };
        match self.kind.p_component() {
            None => OrbitalValue {
                value: v,
                gradient: unit * d1,
                laplacian: d2 + 2.0 * d1 / rn,
            },
            Some(m) => {
                let mut gradient = unit * (r[m] * d1);
                gradient[m] += v;
                OrbitalValue {
                    value: r[m] * v,
                    gradient,
                    laplacian: r[m] * (d2 + 4.0 * d1 / rn),
                }
            }
        }
    }
}

fn check_zeta(zeta: f64) -> Result<()> {
    if zeta > 0.0 && zeta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "orbital exponent must be positive, got {zeta}"
        )))
    }
}
