//! Trial wave functions with analytic value, gradient and Laplacian.
//!
//! Every implementation returns *absolute* derivatives (∇Ψ and ∇²Ψ, not the
//! ratios), so derivatives stay defined on the nodal surface. Ratios and the
//! local energy are formed in [`gradient_and_laplacian`] and [`local_energy`].

mod ci;
mod distance;
mod file;
mod hylleraas;
mod jastrow;
mod orbital;
pub mod two_electron;

use std::fmt::Debug;

use crate::configuration::{ElectronConfiguration, Spin, Vec3};
use crate::error::{Error, Result};

pub use ci::{
    build_be_hf, build_be_hf_with, build_be_phi2, build_be_two_config, build_be_two_config_with, build_hydrogenic,
    build_li_rhf, build_li_rhf_with, BeOrbitalExponents, CIWaveFunction, DeterminantProduct, TwoSForm,
};
pub use distance::{distance_count, DistanceFunction, DistanceIndex};
pub use file::{load_wave_function, parse_wave_function, JastrowSpec, WaveFunctionFile, WaveFunctionSpec};
pub use hylleraas::{
    build_he_triplet_hylleraas, he_triplet_basis, project_2s, AntisymmetrizedDistanceFunction, HylleraasSeries,
    HylleraasTerm, HylleraasWaveFunction,
};
pub use jastrow::{JastrowFactor, JastrowWaveFunction};
pub use orbital::{OrbitalKind, OrbitalValue, RadialFunction, RadialTerm, SlaterOrbital};

/// Absolute derivatives of Ψ at one configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivatives {
    pub value: f64,
    /// ∇ᵢΨ for every electron.
    pub gradient: Vec<Vec3>,
    /// Σᵢ ∇ᵢ²Ψ.
    pub laplacian: f64,
}

impl Derivatives {
    pub fn zero(n: usize) -> Self {
        Self {
            value: 0.0,
            gradient: vec![Vec3::zeros(); n],
            laplacian: 0.0,
        }
    }

    /// `self += k · other`.
    pub fn add_scaled(&mut self, k: f64, other: &Derivatives) {
        self.value += k * other.value;
        for (g, o) in self.gradient.iter_mut().zip(&other.gradient) {
            *g += o * k;
        }
        self.laplacian += k * other.laplacian;
    }
}

/// Ratios and local energy at a point where Ψ ≠ 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// ∇Ψ/Ψ per electron (half the drift velocity).
    pub gradient: Vec<Vec3>,
    pub laplacian_over_psi: f64,
    /// Hartree.
    pub local_energy: f64,
}

/// An antisymmetric trial function of the electron coordinates.
///
/// Implementations are immutable and evaluated concurrently.
pub trait TrialWaveFunction: Send + Sync + Debug {
    /// Spin label of each electron slot.
    fn spins(&self) -> &[Spin];

    /// Ψ without layout checks.
    fn value_unchecked(&self, config: &ElectronConfiguration) -> f64;

    /// Ψ, ∇Ψ and ∇²Ψ without layout checks.
    fn derivatives_unchecked(&self, config: &ElectronConfiguration) -> Derivatives;

    /// True for functions of total orbital angular momentum zero, which are
    /// invariant under rigid rotations about the nucleus.
    fn is_s_state(&self) -> bool {
        true
    }

    fn label(&self) -> String;
}

pub fn check_layout(wf: &dyn TrialWaveFunction, config: &ElectronConfiguration) -> Result<()> {
    if wf.spins() != config.spins() {
        return Err(Error::LayoutMismatch {
            expected: format!("{:?}", wf.spins()),
            actual: format!("{:?}", config.spins()),
        });
    }
    Ok(())
}

pub fn evaluate(wf: &dyn TrialWaveFunction, config: &ElectronConfiguration) -> Result<f64> {
    check_layout(wf, config)?;
    Ok(wf.value_unchecked(config))
}

/// Coulomb potential energy `-Z Σ 1/rᵢ + Σ 1/rᵢⱼ` in hartree.
pub fn potential_energy(config: &ElectronConfiguration) -> f64 {
    let z = f64::from(config.nuclear_charge());
    let p = config.positions();
    let mut v = 0.0;
    for i in 0..p.len() {
        v -= z / p[i].norm();
        for j in i + 1..p.len() {
            v += 1.0 / (p[i] - p[j]).norm();
        }
    }
    v
}

/// Turns absolute derivatives into an [`Evaluation`]; `None` at a node.
pub fn ratios(config: &ElectronConfiguration, d: &Derivatives) -> Option<Evaluation> {
    if d.value == 0.0 || !d.value.is_finite() {
        return None;
    }
    let inv = 1.0 / d.value;
    let laplacian_over_psi = d.laplacian * inv;
    Some(Evaluation {
        value: d.value,
        gradient: d.gradient.iter().map(|g| g * inv).collect(),
        laplacian_over_psi,
        local_energy: -0.5 * laplacian_over_psi + potential_energy(config),
    })
}

pub fn gradient_and_laplacian(wf: &dyn TrialWaveFunction, config: &ElectronConfiguration) -> Result<Evaluation> {
    check_layout(wf, config)?;
    let d = wf.derivatives_unchecked(config);
    ratios(config, &d).ok_or(Error::OnNode(d.value))
}

/// Local energy `HΨ/Ψ`; errors on a node or a coalescence point.
pub fn local_energy(wf: &dyn TrialWaveFunction, config: &ElectronConfiguration) -> Result<f64> {
    let table = config.distances();
    let closest = table.min_pair().min(table.min_radius());
    if closest == 0.0 {
        return Err(Error::Coalescence(closest));
    }
    Ok(gradient_and_laplacian(wf, config)?.local_energy)
}

/// Scale-free zero test: `|Ψ(R)| < 1e-10 ×` the largest `|Ψ|` over a probe
/// ball of radius 0.1 bohr around `R` (centre plus ±0.1 along each of the 3N
/// coordinate axes).
pub fn is_zero(wf: &dyn TrialWaveFunction, config: &ElectronConfiguration) -> bool {
    let v = wf.value_unchecked(config).abs();
    v <= ZERO_RELATIVE_TOLERANCE * local_scale(|c| wf.value_unchecked(c), config)
}

pub const ZERO_RELATIVE_TOLERANCE: f64 = 1e-10;
pub const PROBE_RADIUS: f64 = 0.1;

/// Largest `|f|` over the centre, the 6N axis probe points and two diagonal
/// probes that move every coordinate at once (product-type zero sets are flat
/// along single axes).
pub fn local_scale(f: impl Fn(&ElectronConfiguration) -> f64, config: &ElectronConfiguration) -> f64 {
    let mut scale = f(config).abs();
    let mut positions = config.positions().to_vec();
    let step = PROBE_RADIUS / ((3 * positions.len()) as f64).sqrt();
    for sign in [-1.0, 1.0] {
        let moved: Vec<Vec3> = positions
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let s = if i % 2 == 0 { sign } else { -sign };
                p + Vec3::new(s * step, -s * step, s * step)
            })
            .collect();
        scale = scale.max(f(&config.with_positions_unchecked(moved)).abs());
    }
    for i in 0..positions.len() {
        for k in 0..3 {
            for s in [-PROBE_RADIUS, PROBE_RADIUS] {
                let orig = positions[i][k];
                positions[i][k] = orig + s;
                scale = scale.max(f(&config.with_positions_unchecked(positions.clone())).abs());
                positions[i][k] = orig;
            }
        }
    }
    scale
}

/// Central finite-difference gradient and Laplacian of Ψ (test oracle and
/// diagnostics).
pub fn finite_difference_derivatives(
    wf: &dyn TrialWaveFunction,
    config: &ElectronConfiguration,
    h: f64,
) -> Derivatives {
    let v0 = wf.value_unchecked(config);
    let mut out = Derivatives::zero(config.len());
    out.value = v0;
    let mut positions = config.positions().to_vec();
    for i in 0..positions.len() {
        for k in 0..3 {
            let orig = positions[i][k];
            positions[i][k] = orig + h;
            let fp = wf.value_unchecked(&config.with_positions_unchecked(positions.clone()));
            positions[i][k] = orig - h;
            let fm = wf.value_unchecked(&config.with_positions_unchecked(positions.clone()));
            positions[i][k] = orig;
            out.gradient[i][k] = (fp - fm) / (2.0 * h);
            out.laplacian += (fp - 2.0 * v0 + fm) / (h * h);
        }
    }
    out
}

/// Richardson extrapolation `(4 D(h/2) − D(h)) / 3` of the central
/// differences: O(h⁴) truncation, so a larger `h` keeps round-off low.
pub fn richardson_derivatives(wf: &dyn TrialWaveFunction, config: &ElectronConfiguration, h: f64) -> Derivatives {
    let coarse = finite_difference_derivatives(wf, config, h);
    let mut out = finite_difference_derivatives(wf, config, 0.5 * h);
    for (g, c) in out.gradient.iter_mut().zip(&coarse.gradient) {
        *g = (*g * 4.0 - c) / 3.0;
    }
    out.laplacian = (4.0 * out.laplacian - coarse.laplacian) / 3.0;
    out
}
