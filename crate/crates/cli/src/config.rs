//! Run configuration files.
//!
//! ```toml
//! system = "li"
//! wave_function = "../wavefunctions/li_rhf_guide.toml"
//! seed = 20
//! output = "../out/li"
//!
//! [node]
//! kind = "li_rhf"
//!
//! [dmc]
//! tau = 0.01
//! target_population = 1000
//! equilibration_steps = 4000
//! measurement_steps = 20000
//! ```
//!
//! Paths are relative to the file. Every table rejects unknown keys.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use nodeqmc::nodal::{CrossSectionSpec, NodeFunction, SectionLayout, DEFAULT_COINCIDENCE_RADIUS, MIN_RESOLUTION};
use nodeqmc::nodeopt::ParameterSpace;
use nodeqmc::qmc::{DmcParams, VmcParams, MIN_BLOCKING_LENGTH};
use nodeqmc::wavefunction::{load_wave_function, WaveFunctionFile};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    HeTriplet,
    Li,
    Be,
}

impl System {
    pub fn nuclear_charge(self) -> u32 {
        match self {
            System::HeTriplet => 2,
            System::Li => 3,
            System::Be => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            System::HeTriplet => "he_triplet",
            System::Li => "li",
            System::Be => "be",
        }
    }
}

/// A path to a wave-function file, or the file's contents inline (as
/// written into manifests).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WaveFunctionSource {
    Path(PathBuf),
    Inline(Box<WaveFunctionFile>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NodeSpec {
    /// The node of the wave function itself.
    #[default]
    Guide,
    ExactTriplet,
    LiRhf,
    Product,
    ConjecturedBe {
        a: f64,
    },
}

impl NodeSpec {
    /// `None` for the guide's own node.
    pub fn function(&self) -> Option<NodeFunction> {
        match self {
            NodeSpec::Guide => None,
            NodeSpec::ExactTriplet => Some(NodeFunction::ExactTriplet),
            NodeSpec::LiRhf => Some(NodeFunction::LiRhf),
            NodeSpec::Product => Some(NodeFunction::Product),
            NodeSpec::ConjecturedBe { a } => Some(NodeFunction::ConjecturedBe { a: *a }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VmcSection {
    pub n_steps: usize,
    pub step_size: f64,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_chains")]
    pub n_chains: usize,
}

fn default_burn_in() -> usize {
    1000
}

fn default_chains() -> usize {
    64
}

impl VmcSection {
    pub fn params(&self, seed: u64) -> VmcParams {
        VmcParams {
            n_steps: self.n_steps,
            step_size: self.step_size,
            burn_in: self.burn_in,
            seed,
            n_chains: self.n_chains,
            sample_every: 0,
            record_walk: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmcSection {
    /// Time step of a single run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Time steps of an extrapolation ladder; replaces `tau`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_ladder: Option<Vec<f64>>,
    pub target_population: usize,
    /// Step counts at the largest time step.
    pub equilibration_steps: usize,
    pub measurement_steps: usize,
    /// Scale step counts by `τ_max / τ` so every run covers the same
    /// imaginary time.
    #[serde(default = "default_true")]
    pub scale_steps: bool,
    #[serde(default = "default_period")]
    pub trial_energy_period: usize,
    #[serde(default = "default_vmc_step")]
    pub vmc_step_size: f64,
    #[serde(default = "default_vmc_burn_in")]
    pub vmc_burn_in: usize,
    /// Write the per-generation trace of each run as CSV.
    #[serde(default)]
    pub write_trace: bool,
}

fn default_true() -> bool {
    true
}

fn default_period() -> usize {
    10
}

fn default_vmc_step() -> f64 {
    0.2
}

fn default_vmc_burn_in() -> usize {
    500
}

impl DmcSection {
    pub fn taus(&self) -> Vec<f64> {
        match (&self.tau_ladder, self.tau) {
            (Some(l), _) => l.clone(),
            (None, Some(t)) => vec![t],
            (None, None) => Vec::new(),
        }
    }

    /// Parameters of run `index` of the ladder.
    pub fn params(&self, index: usize, seed: u64) -> DmcParams {
        let taus = self.taus();
        let tau = taus[index];
        let tau_max = taus.iter().copied().fold(f64::MIN, f64::max);
        let scale = if self.scale_steps { tau_max / tau } else { 1.0 };
        DmcParams {
            tau,
            target_population: self.target_population,
            equilibration_steps: (self.equilibration_steps as f64 * scale).round() as usize,
            measurement_steps: (self.measurement_steps as f64 * scale).round() as usize,
            trial_energy_period: self.trial_energy_period,
            seed,
            vmc_step_size: self.vmc_step_size,
            vmc_burn_in: self.vmc_burn_in,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub t1_max: f64,
    pub t2_max: f64,
    pub n1: usize,
    pub n2: usize,
    /// Random beryllium remainders drawn from the seed; ignored when
    /// `layout` is given.
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<SectionLayout>,
}

fn default_draws() -> usize {
    1
}

impl ScanSection {
    pub fn spec(&self, layout: SectionLayout) -> CrossSectionSpec {
        CrossSectionSpec {
            layout,
            t1_max: self.t1_max,
            t2_max: self.t2_max,
            n1: self.n1,
            n2: self.n2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    /// `(r1, −r1, r3, −r3)` when Ψ is non-zero there, else a sampled point.
    Rotation,
    /// A point sampled from `|Ψ|²`.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySection {
    #[serde(default = "default_reference")]
    pub reference: ReferenceKind,
    #[serde(default = "default_r1")]
    pub r1: [f64; 3],
    #[serde(default = "default_r3")]
    pub r3: [f64; 3],
    #[serde(default = "default_rotation_steps")]
    pub rotation_steps: usize,
    #[serde(default = "default_search_iterations")]
    pub search_iterations: usize,
    #[serde(default = "default_waypoints")]
    pub waypoints: usize,
    #[serde(default = "default_segment_samples")]
    pub samples_per_segment: usize,
    /// Sampled pairs for the tiling spot check (0 skips it).
    #[serde(default)]
    pub tiling_pairs: usize,
}

fn default_reference() -> ReferenceKind {
    ReferenceKind::Rotation
}

fn default_r1() -> [f64; 3] {
    [0.8, 0.2, 0.1]
}

fn default_r3() -> [f64; 3] {
    [0.5, 1.1, -0.3]
}

fn default_rotation_steps() -> usize {
    256
}

fn default_search_iterations() -> usize {
    4000
}

fn default_waypoints() -> usize {
    8
}

fn default_segment_samples() -> usize {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingsSection {
    /// Walk length; the number of segments is one less.
    pub n_steps: usize,
    pub step_size: f64,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_radius() -> f64 {
    DEFAULT_COINCIDENCE_RADIUS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    pub n_steps: usize,
    pub step_size: f64,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_chains")]
    pub n_chains: usize,
    pub sample_every: usize,
}

impl SamplingSection {
    pub fn params(&self, seed: u64) -> VmcParams {
        VmcParams {
            n_steps: self.n_steps,
            step_size: self.step_size,
            burn_in: self.burn_in,
            seed,
            n_chains: self.n_chains,
            sample_every: self.sample_every,
            record_walk: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum OptimizeSection {
    /// Fixed-node DMC over the parameter `a` of the conjectured beryllium
    /// node, with a node-envelope guide.
    NodeScan {
        a_values: Vec<f64>,
        #[serde(default)]
        refinements: usize,
        zeta_inner: f64,
        zeta_outer: f64,
        tau: f64,
        target_population: usize,
        equilibration_steps: usize,
        measurement_steps: usize,
    },
    /// Correlated-sampling minimization of the VMC energy over named
    /// numeric fields of the wave-function file (`wave_function.zeta_2s`,
    /// `jastrow.b_antiparallel`, ...).
    Variational {
        parameters: ParameterSpace,
        rounds: usize,
        #[serde(default = "default_evaluations")]
        max_evaluations: usize,
        sampling: SamplingSection,
    },
    /// Linear coefficients of a Hylleraas expansion by the sampled
    /// eigenvalue problem. `basis_order` replaces a lithium expansion by
    /// the full basis of that order with exponents `alpha`, `beta`.
    Linear {
        iterations: usize,
        sampling: SamplingSection,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basis_order: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
        /// Sampling function of the first iteration.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial_guide: Option<WaveFunctionSource>,
    },
    /// Deterministic Rayleigh–Ritz He triplet expansion with optimized
    /// exponents.
    Benchmark { order: u32 },
}

fn default_evaluations() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: System,
    pub wave_function: WaveFunctionSource,
    #[serde(default)]
    pub node: NodeSpec,
    pub seed: u64,
    pub output: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vmc: Option<VmcSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dmc: Option<DmcSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<TopologySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossings: Option<CrossingsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSection>,
}

fn config_error(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn inline(source: &WaveFunctionSource, base: &Path) -> Result<WaveFunctionSource, CliError> {
    Ok(match source {
        WaveFunctionSource::Path(p) => {
            let path = base.join(p);
            WaveFunctionSource::Inline(Box::new(load_wave_function(&path).map_err(config_error)?))
        }
        WaveFunctionSource::Inline(w) => WaveFunctionSource::Inline(w.clone()),
    })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(config_error)
    }

    /// Reads a TOML run file, or the `config` entry of a JSON manifest, and
    /// resolves it: wave functions inlined, output made absolute.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let config = if path.extension().is_some_and(|e| e == "json") {
            #[derive(Deserialize)]
            struct Manifest {
                config: RunConfig,
            }
            serde_json::from_str::<Manifest>(&text).map_err(config_error)?.config
        } else {
            Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        };
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let base = if base.as_os_str().is_empty() {
            PathBuf::from(".")
        } else {
            base
        };
        config.resolve(&base)
    }

    pub fn resolve(mut self, base: &Path) -> Result<Self, CliError> {
        self.wave_function = inline(&self.wave_function, base)?;
        if let Some(OptimizeSection::Linear {
            initial_guide: Some(g), ..
        }) = &mut self.optimize
        {
            *g = inline(g, base)?;
        }
        if self.output.is_relative() {
            let joined = base.join(&self.output);
            self.output = std::path::absolute(&joined).unwrap_or(joined);
        }
        self.validate()?;
        Ok(self)
    }

    pub fn wave_function_file(&self) -> &WaveFunctionFile {
        match &self.wave_function {
            WaveFunctionSource::Inline(w) => w,
            WaveFunctionSource::Path(_) => panic!("configuration not resolved"),
        }
    }

    /// Checks that do not need a run.
    pub fn validate(&self) -> Result<(), CliError> {
        let wf = self.wave_function_file();
        let z = self.system.nuclear_charge();
        if wf.nuclear_charge() != z {
            return Err(CliError::Config(format!(
                "system {} has Z = {z} but the wave function is for Z = {}",
                self.system.name(),
                wf.nuclear_charge()
            )));
        }
        let built = wf.build().map_err(config_error)?;
        if let Some(node) = self.node.function() {
            if node.spins() != built.spins() {
                return Err(CliError::Config(format!(
                    "node {} does not match the electron layout of {}",
                    node.label(),
                    built.label()
                )));
            }
        }
        if let Some(v) = &self.vmc {
            v.params(self.seed).validate().map_err(config_error)?;
        }
        if let Some(d) = &self.dmc {
            let taus = d.taus();
            if taus.is_empty() {
                return Err(CliError::Config("[dmc] needs tau or tau_ladder".into()));
            }
            if d.tau.is_some() && d.tau_ladder.is_some() {
                return Err(CliError::Config("[dmc] takes tau or tau_ladder, not both".into()));
            }
            if let Some(l) = &d.tau_ladder {
                let mut sorted = l.clone();
                sorted.sort_by(f64::total_cmp);
                sorted.dedup();
                if sorted.len() < 2 {
                    return Err(CliError::Config(
                        "tau_ladder needs at least two distinct time steps".into(),
                    ));
                }
            }
            for k in 0..taus.len() {
                d.params(k, self.seed).validate().map_err(config_error)?;
            }
        }
        if let Some(s) = &self.scan {
            let layout = match (&s.layout, self.system) {
                (Some(l), _) => l.clone(),
                (None, System::Be) => SectionLayout::Beryllium {
                    rays: [[1.0, 0.0, 0.0]; 4],
                    rho12: 1.0,
                    rho34: 1.0,
                },
                (None, _) => {
                    return Err(CliError::Config(
                        "[scan] needs an explicit layout unless the system is be".into(),
                    ))
                }
            };
            if s.n1 < MIN_RESOLUTION || s.n2 < MIN_RESOLUTION {
                return Err(CliError::Config(format!(
                    "scan resolution must be at least {MIN_RESOLUTION} per axis, got {}x{}",
                    s.n1, s.n2
                )));
            }
            s.spec(layout.clone()).validate().map_err(config_error)?;
            if s.draws == 0 && s.layout.is_none() {
                return Err(CliError::Config("[scan] draws must be positive".into()));
            }
            let spins = s.spec(layout).spins();
            if spins != built.spins() {
                return Err(CliError::Config("scan layout does not match the wave function".into()));
            }
        }
        if let Some(t) = &self.topology {
            if t.rotation_steps == 0 || t.samples_per_segment == 0 {
                return Err(CliError::Config(
                    "rotation_steps and samples_per_segment must be positive".into(),
                ));
            }
        }
        if let Some(c) = &self.crossings {
            if c.n_steps < 2 || !positive(c.step_size) || !positive(c.radius) {
                return Err(CliError::Config(
                    "[crossings] needs n_steps >= 2 and positive step_size and radius".into(),
                ));
            }
        }
        if let Some(o) = &self.optimize {
            match o {
                OptimizeSection::NodeScan {
                    a_values,
                    tau,
                    target_population,
                    equilibration_steps,
                    measurement_steps,
                    ..
                } => {
                    if self.system != System::Be {
                        return Err(CliError::Config("node_scan is defined for be only".into()));
                    }
                    if !a_values.contains(&0.0) {
                        return Err(CliError::Config("a_values must include 0".into()));
                    }
                    DmcParams {
                        tau: *tau,
                        target_population: *target_population,
                        equilibration_steps: *equilibration_steps,
                        measurement_steps: *measurement_steps,
                        trial_energy_period: default_period(),
                        seed: self.seed,
                        vmc_step_size: default_vmc_step(),
                        vmc_burn_in: default_vmc_burn_in(),
                    }
                    .validate()
                    .map_err(config_error)?;
                }
                OptimizeSection::Variational {
                    parameters, sampling, ..
                } => {
                    parameters.validate().map_err(config_error)?;
                    sampling.params(self.seed).validate().map_err(config_error)?;
                    if sampling.sample_every == 0 {
                        return Err(CliError::Config("sampling.sample_every must be positive".into()));
                    }
                }
                OptimizeSection::Linear { sampling, .. } => {
                    sampling.params(self.seed).validate().map_err(config_error)?;
                    if sampling.sample_every == 0 {
                        return Err(CliError::Config("sampling.sample_every must be positive".into()));
                    }
                }
                OptimizeSection::Benchmark { order } => {
                    if self.system != System::HeTriplet || *order > 6 {
                        return Err(CliError::Config(
                            "benchmark needs system he_triplet and order <= 6".into(),
                        ));
                    }
                }
            }
        }
        if let Some(d) = &self.dmc {
            if d.measurement_steps < MIN_BLOCKING_LENGTH {
                return Err(CliError::Config(format!(
                    "measurement_steps must be at least {MIN_BLOCKING_LENGTH}"
                )));
            }
        }
        Ok(())
    }
}

/// False for NaN as well as for non-positive values.
fn positive(x: f64) -> bool {
    x > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
system = "be"
seed = 3
output = "out"

[wave_function.wave_function]
kind = "be_hf"
zeta_1s = 3.7
zeta_2s = 1.0
zeta_2p = 1.0
"#;

    fn resolve(text: &str) -> Result<RunConfig, CliError> {
        RunConfig::parse(text)?.resolve(Path::new("/tmp"))
    }

    #[test]
    fn inline_wave_function_resolves() {
        let c = resolve(BASE).unwrap();
        assert_eq!(c.system, System::Be);
        assert_eq!(c.node, NodeSpec::Guide);
        assert_eq!(c.output, PathBuf::from("/tmp/out"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(resolve(&format!("colour = 1\n{BASE}")).is_err());
        let text = format!("{BASE}\n[vmc]\nn_steps = 10\nstep_size = 0.1\nstepsize = 0.2\n");
        assert!(resolve(&text).is_err());
    }

    #[test]
    fn scan_resolution_one_is_rejected() {
        let text = format!("{BASE}\n[scan]\nt1_max = 1.0\nt2_max = 1.0\nn1 = 1\nn2 = 1\n");
        assert!(matches!(resolve(&text), Err(CliError::Config(_))));
        let text = format!("{BASE}\n[scan]\nt1_max = 1.0\nt2_max = 1.0\nn1 = 32\nn2 = 32\n");
        assert!(resolve(&text).is_ok());
    }

    #[test]
    fn node_layout_and_charge_are_checked() {
        let text = BASE.replace("system = \"be\"", "system = \"li\"");
        assert!(resolve(&text).is_err());
        let text = format!("{BASE}\n[node]\nkind = \"li_rhf\"\n");
        assert!(resolve(&text).is_err());
        let text = format!("{BASE}\n[node]\nkind = \"conjectured_be\"\na = 0.1\n");
        assert!(resolve(&text).is_ok());
    }

    #[test]
    fn ladder_scales_steps() {
        let text = format!(
            "{BASE}\n[dmc]\ntau_ladder = [0.01, 0.005]\ntarget_population = 200\nequilibration_steps = 100\nmeasurement_steps = 1000\n"
        );
        let c = resolve(&text).unwrap();
        let d = c.dmc.unwrap();
        assert_eq!(d.params(0, 1).measurement_steps, 1000);
        assert_eq!(d.params(1, 1).measurement_steps, 2000);
        assert_eq!(d.params(1, 1).equilibration_steps, 200);
    }
}
