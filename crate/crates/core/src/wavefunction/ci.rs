//! Products of up- and down-spin Slater determinants and their linear
//! combinations.

use crate::configuration::{ElectronConfiguration, Spin, Vec3};
use crate::error::{Error, Result};

use super::orbital::{OrbitalValue, SlaterOrbital};
use super::{Derivatives, TrialWaveFunction};

/// `coefficient × D↑(up orbitals) × D↓(down orbitals)`; orbital indices point
/// into the owning [`CIWaveFunction`]'s orbital list.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminantProduct {
    pub up: Vec<usize>,
    pub down: Vec<usize>,
    pub coefficient: f64,
}

#[derive(Clone, Debug)]
pub struct CIWaveFunction {
    orbitals: Vec<SlaterOrbital>,
    spins: Vec<Spin>,
    up: Vec<usize>,
    down: Vec<usize>,
    terms: Vec<DeterminantProduct>,
    s_state: bool,
    label: String,
}

impl CIWaveFunction {
    pub fn new(
        orbitals: Vec<SlaterOrbital>,
        spins: Vec<Spin>,
        terms: Vec<DeterminantProduct>,
        s_state: bool,
        label: impl Into<String>,
    ) -> Result<Self> {
        let up: Vec<usize> = (0..spins.len()).filter(|&i| spins[i] == Spin::Up).collect();
        let down: Vec<usize> = (0..spins.len()).filter(|&i| spins[i] == Spin::Down).collect();
        if terms.is_empty() {
            return Err(Error::InvalidParameter("CI expansion has no terms".into()));
        }
        for (k, t) in terms.iter().enumerate() {
            if t.up.len() != up.len() || t.down.len() != down.len() {
                return Err(Error::InvalidParameter(format!(
                    "term {k}: determinants must be square ({} up / {} down electrons, got {} / {} orbitals)",
                    up.len(),
                    down.len(),
                    t.up.len(),
                    t.down.len()
                )));
            }
            if let Some(&bad) = t.up.iter().chain(&t.down).find(|&&o| o >= orbitals.len()) {
                return Err(Error::InvalidParameter(format!(
                    "term {k}: orbital index {bad} out of range"
                )));
            }
            if !t.coefficient.is_finite() {
                return Err(Error::InvalidParameter(format!("term {k}: non-finite coefficient")));
            }
        }
        Ok(Self {
            orbitals,
            spins,
            up,
            down,
            terms,
            s_state,
            label: label.into(),
        })
    }

    pub fn terms(&self) -> &[DeterminantProduct] {
        &self.terms
    }

    pub fn orbitals(&self) -> &[SlaterOrbital] {
        &self.orbitals
    }

    fn orbital_values(&self, config: &ElectronConfiguration) -> Vec<f64> {
        let no = self.orbitals.len();
        let mut table = vec![0.0; config.len() * no];
        for (e, r) in config.positions().iter().enumerate() {
            for (o, orb) in self.orbitals.iter().enumerate() {
                table[e * no + o] = orb.value(r);
            }
        }
        table
    }

    fn orbital_table(&self, config: &ElectronConfiguration) -> Vec<OrbitalValue> {
        let no = self.orbitals.len();
        let mut table = vec![OrbitalValue::default(); config.len() * no];
        for (e, r) in config.positions().iter().enumerate() {
            for (o, orb) in self.orbitals.iter().enumerate() {
                table[e * no + o] = orb.evaluate(r);
            }
        }
        table
    }
}

impl TrialWaveFunction for CIWaveFunction {
    fn spins(&self) -> &[Spin] {
        &self.spins
    }

    fn value_unchecked(&self, config: &ElectronConfiguration) -> f64 {
        let no = self.orbitals.len();
        let table = self.orbital_values(config);
        let at = |e: usize, o: usize| table[e * no + o];
        self.terms
            .iter()
            .map(|t| t.coefficient * det_value(&self.up, &t.up, &at) * det_value(&self.down, &t.down, &at))
            .sum()
    }

    fn derivatives_unchecked(&self, config: &ElectronConfiguration) -> Derivatives {
        let no = self.orbitals.len();
        let table = self.orbital_table(config);
        let at = |e: usize, o: usize| &table[e * no + o];
        let mut out = Derivatives::zero(config.len());
        for t in &self.terms {
            let u = det_derivatives(&self.up, &t.up, &at);
            let d = det_derivatives(&self.down, &t.down, &at);
            let c = t.coefficient;
            out.value += c * u.value * d.value;
            for (k, &e) in self.up.iter().enumerate() {
                out.gradient[e] += u.gradient[k] * (c * d.value);
            }
            for (k, &e) in self.down.iter().enumerate() {
                out.gradient[e] += d.gradient[k] * (c * u.value);
            }
            out.laplacian += c * (u.laplacian * d.value + u.value * d.laplacian);
        }
        out
    }

    fn is_s_state(&self) -> bool {
        self.s_state
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

struct DetDerivatives {
    value: f64,
    gradient: Vec<Vec3>,
    laplacian: f64,
}

fn det_value(electrons: &[usize], orbitals: &[usize], at: &impl Fn(usize, usize) -> f64) -> f64 {
    match electrons.len() {
        0 => 1.0,
        1 => at(electrons[0], orbitals[0]),
        2 => {
            let (e0, e1) = (electrons[0], electrons[1]);
            let (o0, o1) = (orbitals[0], orbitals[1]);
            at(e0, o0) * at(e1, o1) - at(e0, o1) * at(e1, o0)
        }
        n => {
            let mut m = vec![0.0; n * n];
            for (r, &e) in electrons.iter().enumerate() {
                for (c, &o) in orbitals.iter().enumerate() {
                    m[r * n + c] = at(e, o);
                }
            }
            determinant(&mut m, n)
        }
    }
}

/// Determinant derivatives by row replacement: electron `r` only enters row
/// `r`, so ∂D/∂x_r and ∇²_r D are determinants with that row replaced by the
/// orbital derivatives. Valid on the node, unlike inverse-based formulas.
fn det_derivatives<'a>(
    electrons: &[usize],
    orbitals: &[usize],
    at: &impl Fn(usize, usize) -> &'a OrbitalValue,
) -> DetDerivatives {
    let n = electrons.len();
    match n {
        0 => DetDerivatives {
            value: 1.0,
            gradient: Vec::new(),
            laplacian: 0.0,
        },
        1 => {
            let v = at(electrons[0], orbitals[0]);
            DetDerivatives {
                value: v.value,
                gradient: vec![v.gradient],
                laplacian: v.laplacian,
            }
        }
        2 => {
            let (e0, e1) = (electrons[0], electrons[1]);
            let (o0, o1) = (orbitals[0], orbitals[1]);
            let (a00, a01, a10, a11) = (at(e0, o0), at(e0, o1), at(e1, o0), at(e1, o1));
            DetDerivatives {
                value: a00.value * a11.value - a01.value * a10.value,
                gradient: vec![
                    a00.gradient * a11.value - a01.gradient * a10.value,
                    a11.gradient * a00.value - a10.gradient * a01.value,
                ],
                laplacian: a00.laplacian * a11.value - a01.laplacian * a10.value + a11.laplacian * a00.value
                    - a10.laplacian * a01.value,
            }
        }
        _ => {
            let mut base = vec![0.0; n * n];
            for (r, &e) in electrons.iter().enumerate() {
                for (c, &o) in orbitals.iter().enumerate() {
                    base[r * n + c] = at(e, o).value;
                }
            }
            let value = determinant(&mut base.clone(), n);
            let mut gradient = vec![Vec3::zeros(); n];
            let mut laplacian = 0.0;
            for (r, &e) in electrons.iter().enumerate() {
                let replaced = |f: &dyn Fn(&OrbitalValue) -> f64| {
                    let mut m = base.clone();
                    for (c, &o) in orbitals.iter().enumerate() {
                        m[r * n + c] = f(at(e, o));
                    }
                    determinant(&mut m, n)
                };
                for (k, g) in gradient[r].iter_mut().enumerate() {
                    *g = replaced(&|v| v.gradient[k]);
                }
                laplacian += replaced(&|v| v.laplacian);
            }
            DetDerivatives {
                value,
                gradient,
                laplacian,
            }
        }
    }
}

/// Determinant by Gaussian elimination with partial pivoting (destroys `m`).
fn determinant(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a * n + col].abs().total_cmp(&m[b * n + col].abs()))
            .unwrap();
        if m[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for row in col + 1..n {
            let f = m[row * n + col] / p;
            for k in col..n {
                m[row * n + k] -= f * m[col * n + k];
            }
        }
    }
    det
}

/// Single-electron hydrogenic function `e^{-ζ r}`.
pub fn build_hydrogenic(zeta: f64) -> Result<CIWaveFunction> {
    CIWaveFunction::new(
        vec![SlaterOrbital::one_s(zeta)?],
        vec![Spin::Up],
        vec![DeterminantProduct {
            up: vec![0],
            down: vec![],
            coefficient: 1.0,
        }],
        true,
        format!("hydrogenic 1s (zeta={zeta})"),
    )
}

/// Form of the 2s orbital in the lithium and beryllium builders.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoSForm {
    /// `r e^{-ζ₂ r}` with its 1s projection removed.
    #[default]
    Projected,
    /// `(1 − (Z − ζ₂) r) e^{-ζ₂ r}`; with `ζ_1s = Z` the function has the
    /// exact electron-nucleus cusp. The node is the same.
    NuclearCusp,
}

impl TwoSForm {
    pub fn is_projected(&self) -> bool {
        *self == TwoSForm::Projected
    }

    fn orbital(self, nuclear_charge: u32, zeta_1s: f64, zeta_2s: f64) -> Result<SlaterOrbital> {
        match self {
            TwoSForm::Projected => SlaterOrbital::two_s(zeta_1s, zeta_2s),
            TwoSForm::NuclearCusp => SlaterOrbital::two_s_cusp(f64::from(nuclear_charge), zeta_2s),
        }
    }

    fn label(self) -> &'static str {
        match self {
            TwoSForm::Projected => "",
            TwoSForm::NuclearCusp => ", cusp 2s",
        }
    }
}

/// Restricted Hartree-Fock lithium `(1s(r1)2s(r3) − 1s(r3)2s(r1)) 1s(r2)`.
///
/// Electron slots are (up, down, up); the like-spin pair is electrons 0 and 2.
/// With `zeta_1s >= zeta_2s` the zero set is exactly `r1 = r3`.
pub fn build_li_rhf(zeta_1s: f64, zeta_2s: f64) -> Result<CIWaveFunction> {
    build_li_rhf_with(zeta_1s, zeta_2s, TwoSForm::Projected)
}

pub fn build_li_rhf_with(zeta_1s: f64, zeta_2s: f64, form: TwoSForm) -> Result<CIWaveFunction> {
    CIWaveFunction::new(
        vec![SlaterOrbital::one_s(zeta_1s)?, form.orbital(3, zeta_1s, zeta_2s)?],
        vec![Spin::Up, Spin::Down, Spin::Up],
        vec![DeterminantProduct {
            up: vec![0, 1],
            down: vec![0],
            coefficient: 1.0,
        }],
        true,
        format!("Li RHF (zeta_1s={zeta_1s}, zeta_2s={zeta_2s}{})", form.label()),
    )
}

/// Orbital exponents for the beryllium functions.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BeOrbitalExponents {
    pub zeta_1s: f64,
    pub zeta_2s: f64,
    pub zeta_2p: f64,
}

impl Default for BeOrbitalExponents {
    fn default() -> Self {
        Self {
            zeta_1s: 3.7,
            zeta_2s: 1.0,
            zeta_2p: 1.0,
        }
    }
}

const BE_SPINS: [Spin; 4] = [Spin::Up, Spin::Up, Spin::Down, Spin::Down];

fn be_orbitals(z: &BeOrbitalExponents, form: TwoSForm) -> Result<Vec<SlaterOrbital>> {
    Ok(vec![
        SlaterOrbital::one_s(z.zeta_1s)?,
        form.orbital(4, z.zeta_1s, z.zeta_2s)?,
        SlaterOrbital::two_p(0, z.zeta_2p)?,
        SlaterOrbital::two_p(1, z.zeta_2p)?,
        SlaterOrbital::two_p(2, z.zeta_2p)?,
    ])
}

fn phi1_term() -> DeterminantProduct {
    DeterminantProduct {
        up: vec![0, 1],
        down: vec![0, 1],
        coefficient: 1.0,
    }
}

fn phi2_terms(c2: f64) -> impl Iterator<Item = DeterminantProduct> {
    (2..5).map(move |p| DeterminantProduct {
        up: vec![0, p],
        down: vec![0, p],
        coefficient: c2,
    })
}

/// Beryllium `(1s)²(2s)²` single configuration; zero set `(r1−r2)(r3−r4) = 0`.
pub fn build_be_hf(z: &BeOrbitalExponents) -> Result<CIWaveFunction> {
    build_be_hf_with(z, TwoSForm::Projected)
}

pub fn build_be_hf_with(z: &BeOrbitalExponents, form: TwoSForm) -> Result<CIWaveFunction> {
    CIWaveFunction::new(
        be_orbitals(z, form)?,
        BE_SPINS.to_vec(),
        vec![phi1_term()],
        true,
        format!("Be HF{}", form.label()),
    )
}

/// The `(1s)²(2p)²` ¹S configuration `Σ_m D↑(1s,2p_m) D↓(1s,2p_m)` alone.
pub fn build_be_phi2(z: &BeOrbitalExponents) -> Result<CIWaveFunction> {
    CIWaveFunction::new(
        be_orbitals(z, TwoSForm::Projected)?,
        BE_SPINS.to_vec(),
        phi2_terms(1.0).collect(),
        true,
        "Be (1s)2(2p)2",
    )
}

/// `φ₁ + c₂ φ₂` with `φ₁ = (1s)²(2s)²` and `φ₂ = (1s)²(2p)²` (m-summed).
pub fn build_be_two_config(c2: f64, z: &BeOrbitalExponents) -> Result<CIWaveFunction> {
    build_be_two_config_with(c2, z, TwoSForm::Projected)
}

pub fn build_be_two_config_with(c2: f64, z: &BeOrbitalExponents, form: TwoSForm) -> Result<CIWaveFunction> {
    if !(c2.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("|c2| must be < 1, got {c2}")));
    }
    let terms = std::iter::once(phi1_term()).chain(phi2_terms(c2)).collect();
    CIWaveFunction::new(
        be_orbitals(z, form)?,
        BE_SPINS.to_vec(),
        terms,
        true,
        format!("Be two-config (c2={c2}{})", form.label()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::{apply_permutation, make_be_reference_point, rotate_all, SpinPermutation};
    use crate::wavefunction::{evaluate, finite_difference_derivatives, gradient_and_laplacian, local_energy};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut impl Rng, scale: f64) -> Vec3 {
        Vec3::new(
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
        )
    }

    fn random_config(rng: &mut impl Rng, spins: &[Spin], z: u32) -> ElectronConfiguration {
        ElectronConfiguration::new(spins.iter().map(|_| random_vec(rng, 2.5)).collect(), spins.to_vec(), z).unwrap()
    }

    #[test]
    fn hydrogen_ground_state_ratios() {
        let wf = build_hydrogenic(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let c = random_config(&mut rng, &[Spin::Up], 1);
            let r = c.position(0);
            let ev = gradient_and_laplacian(&wf, &c).unwrap();
            assert!((ev.gradient[0] + r / r.norm()).norm() < 1e-12);
            assert_relative_eq!(ev.laplacian_over_psi, 1.0 - 2.0 / r.norm(), max_relative = 1e-12);
            assert!((local_energy(&wf, &c).unwrap() + 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn helium_ion_is_exact() {
        let wf = build_hydrogenic(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let c = random_config(&mut rng, &[Spin::Up], 2);
            assert!((local_energy(&wf, &c).unwrap() + 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn li_rhf_vanishes_on_equal_like_spin_radii() {
        let wf = build_li_rhf(2.69, 0.64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let u1 = random_vec(&mut rng, 1.0).normalize();
            let u3 = random_vec(&mut rng, 1.0).normalize();
            let c = ElectronConfiguration::new(
                vec![u1 * 1.2, random_vec(&mut rng, 2.0), u3 * 1.2],
                vec![Spin::Up, Spin::Down, Spin::Up],
                3,
            )
            .unwrap();
            assert!(crate::wavefunction::is_zero(&wf, &c), "{}", evaluate(&wf, &c).unwrap());
        }
    }

    #[test]
    fn li_rhf_sign_follows_radial_order() {
        let wf = build_li_rhf(2.69, 0.64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let swap = SpinPermutation::transposition(3, 0, 2).unwrap();
        for _ in 0..500 {
            let c = random_config(&mut rng, &[Spin::Up, Spin::Down, Spin::Up], 3);
            let v = evaluate(&wf, &c).unwrap();
            assert!(v != 0.0);
            assert_eq!(v > 0.0, c.radius(0) > c.radius(2));
            let swapped = evaluate(&wf, &apply_permutation(&c, &swap).unwrap()).unwrap();
            assert_relative_eq!(swapped, -v, max_relative = 1e-12);
        }
    }

    #[test]
    fn be_hf_vanishes_when_up_radii_agree() {
        let wf = build_be_hf(&BeOrbitalExponents::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let mut c = random_config(&mut rng, &BE_SPINS, 4);
            let r = c.radius(0);
            let mut p = c.positions().to_vec();
            p[1] = p[1].normalize() * r;
            c = c.with_positions(p).unwrap();
            assert!(crate::wavefunction::is_zero(&wf, &c));
        }
    }

    #[test]
    fn phi2_vanishes_at_perpendicular_reference_only() {
        let z = BeOrbitalExponents::default();
        let phi2 = build_be_phi2(&z).unwrap();
        let two = build_be_two_config(0.1, &z).unwrap();
        let hf = build_be_hf(&z).unwrap();
        let p = make_be_reference_point(Vec3::new(0.8, 0.2, -0.1), Vec3::new(0.3, 1.1, 0.4)).unwrap();
        assert!(!p.perpendicular);
        assert!(evaluate(&phi2, &p.config).unwrap().abs() > 1e-6);
        assert!(crate::wavefunction::is_zero(&hf, &p.config));
        assert!(evaluate(&two, &p.config).unwrap().abs() > 1e-6);

        let q = make_be_reference_point(Vec3::x(), Vec3::new(0.0, 0.7, -0.2)).unwrap();
        assert!(q.perpendicular);
        assert!(crate::wavefunction::is_zero(&phi2, &q.config));
    }

    #[test]
    fn phi2_zero_set_is_weighted_dot_product() {
        // Σ_m D↑ D↓ = Π 1s(rᵢ) × (h(r2) r2 − h(r1) r1)·(h(r4) r4 − h(r3) r3) with h = g/1s
        let z = BeOrbitalExponents::default();
        let phi2 = build_be_phi2(&z).unwrap();
        let s1 = SlaterOrbital::one_s(z.zeta_1s).unwrap();
        let p = SlaterOrbital::two_p(0, z.zeta_2p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let c = random_config(&mut rng, &BE_SPINS, 4);
            let x = c.positions();
            let s: Vec<f64> = x.iter().map(|r| s1.value(r)).collect();
            let g: Vec<f64> = x.iter().map(|r| p.radial.eval(r.norm()).0).collect();
            let a = x[1] * (s[0] * g[1]) - x[0] * (g[0] * s[1]);
            let b = x[3] * (s[2] * g[3]) - x[2] * (g[2] * s[3]);
            assert_relative_eq!(evaluate(&phi2, &c).unwrap(), a.dot(&b), max_relative = 1e-12);
        }
    }

    #[test]
    fn antisymmetry_and_rotation_invariance() {
        let z = BeOrbitalExponents::default();
        let wfs: Vec<Box<dyn TrialWaveFunction>> = vec![
            Box::new(build_be_hf(&z).unwrap()),
            Box::new(build_be_two_config(0.2, &z).unwrap()),
            Box::new(build_li_rhf(2.69, 0.64).unwrap()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for wf in &wfs {
            let spins = wf.spins().to_vec();
            let zc = if spins.len() == 3 { 3 } else { 4 };
            let odd: Vec<_> = crate::configuration::spin_preserving_permutations(&spins)
                .into_iter()
                .filter(|p| p.parity() == -1)
                .collect();
            for _ in 0..300 {
                let c = random_config(&mut rng, &spins, zc);
                let v = evaluate(wf.as_ref(), &c).unwrap();
                for p in &odd {
                    let pv = evaluate(wf.as_ref(), &apply_permutation(&c, p).unwrap()).unwrap();
                    assert!((pv + v).abs() <= 1e-12 * v.abs().max(1e-300), "{pv} vs {v}");
                }
                let axis = random_vec(&mut rng, 1.0).normalize();
                let rv = evaluate(wf.as_ref(), &rotate_all(&c, &axis, rng.gen_range(0.0..6.3)).unwrap()).unwrap();
                assert!((rv - v).abs() <= 1e-10 * v.abs(), "{rv} vs {v}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let z = BeOrbitalExponents::default();
        let wfs: Vec<Box<dyn TrialWaveFunction>> = vec![
            Box::new(build_be_two_config(0.15, &z).unwrap()),
            Box::new(build_li_rhf(2.69, 0.64).unwrap()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for wf in &wfs {
            let spins = wf.spins().to_vec();
            for _ in 0..40 {
                let c = random_config(&mut rng, &spins, 4);
                let a = wf.derivatives_unchecked(&c);
                let f = finite_difference_derivatives(wf.as_ref(), &c, 1e-4);
                let gscale = a.gradient.iter().map(|g| g.amax()).fold(0.0, f64::max);
                for (ga, gf) in a.gradient.iter().zip(&f.gradient) {
                    assert!((ga - gf).amax() <= 1e-6 * gscale, "{ga} vs {gf}");
                }
                assert!((a.laplacian - f.laplacian).abs() <= 1e-6 * a.laplacian.abs().max(gscale));
            }
        }
    }

    #[test]
    fn general_determinant_matches_closed_forms() {
        let mut m = vec![2.0, 1.0, 0.5, -1.0, 3.0, 2.0, 0.0, 1.0, 4.0];
        assert_relative_eq!(
            determinant(&mut m, 3),
            2.0 * 10.0 - 1.0 * (-4.0) + -0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn rejects_malformed_expansions() {
        let o = vec![SlaterOrbital::one_s(1.0).unwrap()];
        let bad = DeterminantProduct {
            up: vec![0, 0],
            down: vec![],
            coefficient: 1.0,
        };
        assert!(CIWaveFunction::new(o.clone(), vec![Spin::Up], vec![bad], true, "x").is_err());
        let bad = DeterminantProduct {
            up: vec![3],
            down: vec![],
            coefficient: 1.0,
        };
        assert!(CIWaveFunction::new(o, vec![Spin::Up], vec![bad], true, "x").is_err());
        assert!(build_be_two_config(1.5, &BeOrbitalExponents::default()).is_err());
    }
}
