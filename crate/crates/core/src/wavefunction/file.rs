//! TOML wave-function definitions.
//!
//! ```toml
//! [wave_function]
//! kind = "be_two_config"
//! c2 = 0.1
//! zeta_1s = 3.7
//! zeta_2s = 1.0
//! zeta_2p = 1.0
//! two_s = "nuclear_cusp"  # optional, default "projected"
//!
//! [jastrow]          # optional, guiding functions only
//! b_parallel = 1.0
//! b_antiparallel = 1.0
//! ```
//!
//! Other kinds: `hydrogenic`, `li_rhf`, `be_hf`, `he_triplet` (table of
//! `[i, j, k, c]` rows with exponents `alpha`, `beta`), `li_hylleraas`
//! (`[[wave_function.terms]]` with `powers`, `exponents`, `coefficient` over
//! `r1 r2 r3 r12 r13 r23`) and a generic `ci` expansion.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::configuration::Spin;
use crate::error::{Error, Result};

use super::ci::{
    build_be_hf_with, build_be_two_config_with, build_hydrogenic, build_li_rhf_with, BeOrbitalExponents,
    CIWaveFunction, DeterminantProduct, TwoSForm,
};
use super::hylleraas::{HylleraasSeries, HylleraasTerm, HylleraasWaveFunction};
use super::jastrow::{JastrowFactor, JastrowWaveFunction};
use super::orbital::{OrbitalKind, SlaterOrbital};
use super::TrialWaveFunction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveFunctionFile {
    pub wave_function: WaveFunctionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jastrow: Option<JastrowSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JastrowSpec {
    pub b_parallel: f64,
    pub b_antiparallel: f64,
    #[serde(default = "default_a_parallel")]
    pub a_parallel: f64,
    #[serde(default = "default_a_antiparallel")]
    pub a_antiparallel: f64,
}

fn default_a_parallel() -> f64 {
    0.25
}

fn default_a_antiparallel() -> f64 {
    0.5
}

impl JastrowSpec {
    pub fn factor(&self) -> Result<JastrowFactor> {
        JastrowFactor::new(
            self.a_antiparallel,
            self.b_antiparallel,
            self.a_parallel,
            self.b_parallel,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitalSpec {
    pub kind: OrbitalKind,
    pub zeta: f64,
    /// Exponent of the 1s orbital a 2s is orthogonalized against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_1s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeterminantSpec {
    pub up: Vec<usize>,
    pub down: Vec<usize>,
    pub coefficient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WaveFunctionSpec {
    Hydrogenic {
        zeta: f64,
        #[serde(default = "default_charge")]
        nuclear_charge: u32,
    },
    LiRhf {
        zeta_1s: f64,
        zeta_2s: f64,
        #[serde(default, skip_serializing_if = "TwoSForm::is_projected")]
        two_s: TwoSForm,
    },
    BeHf {
        zeta_1s: f64,
        zeta_2s: f64,
        zeta_2p: f64,
        #[serde(default, skip_serializing_if = "TwoSForm::is_projected")]
        two_s: TwoSForm,
    },
    BeTwoConfig {
        c2: f64,
        zeta_1s: f64,
        zeta_2s: f64,
        zeta_2p: f64,
        #[serde(default, skip_serializing_if = "TwoSForm::is_projected")]
        two_s: TwoSForm,
    },
    HeTriplet {
        alpha: f64,
        beta: f64,
        terms: Vec<(u32, u32, u32, f64)>,
    },
    LiHylleraas {
        terms: Vec<HylleraasTerm>,
    },
    Ci {
        nuclear_charge: u32,
        spins: Vec<Spin>,
        orbitals: Vec<OrbitalSpec>,
        determinants: Vec<DeterminantSpec>,
        #[serde(default = "default_true")]
        s_state: bool,
    },
}

fn default_charge() -> u32 {
    1
}

fn default_true() -> bool {
    true
}

impl WaveFunctionSpec {
    pub fn nuclear_charge(&self) -> u32 {
        match self {
            WaveFunctionSpec::Hydrogenic { nuclear_charge, .. } | WaveFunctionSpec::Ci { nuclear_charge, .. } => {
                *nuclear_charge
            }
            WaveFunctionSpec::HeTriplet { .. } => 2,
            WaveFunctionSpec::LiRhf { .. } | WaveFunctionSpec::LiHylleraas { .. } => 3,
            WaveFunctionSpec::BeHf { .. } | WaveFunctionSpec::BeTwoConfig { .. } => 4,
        }
    }

    pub fn build(&self) -> Result<Arc<dyn TrialWaveFunction>> {
        Ok(match self {
            WaveFunctionSpec::Hydrogenic { zeta, .. } => Arc::new(build_hydrogenic(*zeta)?),
            WaveFunctionSpec::LiRhf {
                zeta_1s,
                zeta_2s,
                two_s,
            } => Arc::new(build_li_rhf_with(*zeta_1s, *zeta_2s, *two_s)?),
            WaveFunctionSpec::BeHf {
                zeta_1s,
                zeta_2s,
                zeta_2p,
                two_s,
            } => Arc::new(build_be_hf_with(
                &BeOrbitalExponents {
                    zeta_1s: *zeta_1s,
                    zeta_2s: *zeta_2s,
                    zeta_2p: *zeta_2p,
                },
                *two_s,
            )?),
            WaveFunctionSpec::BeTwoConfig {
                c2,
                zeta_1s,
                zeta_2s,
                zeta_2p,
                two_s,
            } => Arc::new(build_be_two_config_with(
                *c2,
                &BeOrbitalExponents {
                    zeta_1s: *zeta_1s,
                    zeta_2s: *zeta_2s,
                    zeta_2p: *zeta_2p,
                },
                *two_s,
            )?),
            WaveFunctionSpec::HeTriplet { alpha, beta, terms } => {
                Arc::new(HylleraasWaveFunction::he_triplet(terms, *alpha, *beta)?)
            }
            WaveFunctionSpec::LiHylleraas { terms } => {
                Arc::new(HylleraasWaveFunction::lithium(HylleraasSeries::new(3, terms.clone())?)?)
            }
            WaveFunctionSpec::Ci {
                spins,
                orbitals,
                determinants,
                s_state,
                ..
            } => {
                let orbitals = orbitals.iter().map(build_orbital).collect::<Result<Vec<_>>>()?;
                let terms = determinants
                    .iter()
                    .map(|d| DeterminantProduct {
                        up: d.up.clone(),
                        down: d.down.clone(),
                        coefficient: d.coefficient,
                    })
                    .collect();
                Arc::new(CIWaveFunction::new(
                    orbitals,
                    spins.clone(),
                    terms,
                    *s_state,
                    "CI expansion",
                )?)
            }
        })
    }
}

fn build_orbital(o: &OrbitalSpec) -> Result<SlaterOrbital> {
    match o.kind {
        OrbitalKind::S1 => SlaterOrbital::one_s(o.zeta),
        OrbitalKind::S2 => {
            let z1 = o
                .zeta_1s
                .ok_or_else(|| Error::Parse("a 2s orbital needs zeta_1s".into()))?;
            SlaterOrbital::two_s(z1, o.zeta)
        }
        k => SlaterOrbital::two_p(k.p_component().expect("p orbital"), o.zeta),
    }
}

impl WaveFunctionFile {
    /// The trial function, with the Jastrow factor applied when present.
    pub fn build(&self) -> Result<Arc<dyn TrialWaveFunction>> {
        let base = self.wave_function.build()?;
        match &self.jastrow {
            None => Ok(base),
            Some(j) => Ok(Arc::new(JastrowWaveFunction::new(base, j.factor()?)?)),
        }
    }

    /// The trial function without any Jastrow factor.
    pub fn build_base(&self) -> Result<Arc<dyn TrialWaveFunction>> {
        self.wave_function.build()
    }

    pub fn nuclear_charge(&self) -> u32 {
        self.wave_function.nuclear_charge()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn parse_wave_function(text: &str) -> Result<WaveFunctionFile> {
    toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn load_wave_function(path: impl AsRef<Path>) -> Result<WaveFunctionFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_wave_function(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::{ElectronConfiguration, Vec3};
    use crate::wavefunction::build_li_rhf;

    #[test]
    fn parses_be_two_config_with_jastrow() {
        let f = parse_wave_function(
            r#"
            [wave_function]
            kind = "be_two_config"
            c2 = 0.1
            zeta_1s = 3.7
            zeta_2s = 1.0
            zeta_2p = 1.0

            [jastrow]
            b_parallel = 1.0
            b_antiparallel = 1.0
            "#,
        )
        .unwrap();
        assert_eq!(f.nuclear_charge(), 4);
        let wf = f.build().unwrap();
        assert_eq!(wf.spins().len(), 4);
        assert!(wf.label().contains("Jastrow"));
    }

    #[test]
    fn rejects_unknown_keys() {
        let r = parse_wave_function("[wave_function]\nkind = \"li_rhf\"\nzeta_1s = 2.7\nzeta_2s = 0.6\nzeta = 1\n");
        assert!(matches!(r, Err(Error::Parse(_))));
        let r = parse_wave_function("[wave_function]\nkind = \"li_rhf\"\nzeta_1s = 2.7\nzeta_2s = 0.6\n[extra]\n");
        assert!(r.is_err());
    }

    #[test]
    fn he_triplet_rows_and_round_trip() {
        let f = parse_wave_function(
            "[wave_function]\nkind = \"he_triplet\"\nalpha = 2.0\nbeta = 0.5\nterms = [[0, 1, 0, 1.0], [1, 2, 1, -0.1]]\n",
        )
        .unwrap();
        let wf = f.build().unwrap();
        let c = ElectronConfiguration::new(
            vec![Vec3::new(0.3, 0.0, 0.0), Vec3::new(0.0, 2.0, 0.0)],
            vec![Spin::Up, Spin::Up],
            2,
        )
        .unwrap();
        let v = wf.value_unchecked(&c);
        let again = parse_wave_function(&f.to_toml().unwrap()).unwrap();
        assert_eq!(again, f);
        assert_eq!(again.build().unwrap().value_unchecked(&c), v);
    }

    #[test]
    fn generic_ci_matches_builder() {
        let f = parse_wave_function(
            r#"
            [wave_function]
            kind = "ci"
            nuclear_charge = 3
            spins = ["up", "down", "up"]
            orbitals = [{ kind = "1s", zeta = 2.7 }, { kind = "2s", zeta = 0.65, zeta_1s = 2.7 }]
            determinants = [{ up = [0, 1], down = [0], coefficient = 1.0 }]
            "#,
        )
        .unwrap();
        let generic = f.build().unwrap();
        let direct = build_li_rhf(2.7, 0.65).unwrap();
        let c = ElectronConfiguration::new(
            vec![
                Vec3::new(0.3, 0.1, 0.0),
                Vec3::new(0.0, 1.0, 0.2),
                Vec3::new(-1.5, 0.4, 0.3),
            ],
            vec![Spin::Up, Spin::Down, Spin::Up],
            3,
        )
        .unwrap();
        assert_eq!(generic.value_unchecked(&c), direct.value_unchecked(&c));
    }

    #[test]
    fn two_s_without_partner_is_rejected() {
        let f = parse_wave_function(
            "[wave_function]\nkind = \"ci\"\nnuclear_charge = 1\nspins = [\"up\"]\norbitals = [{ kind = \"2s\", zeta = 1.0 }]\ndeterminants = [{ up = [0], down = [], coefficient = 1.0 }]\n",
        )
        .unwrap();
        assert!(f.build().is_err());
    }
}
