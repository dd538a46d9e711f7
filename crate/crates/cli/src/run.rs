//! Subcommand implementations.

use std::sync::Arc;

use serde::Serialize;

use nodeqmc::configuration::{make_be_reference_point, Vec3};
use nodeqmc::nodal::{
    crossing_coincidence, scan_cross_section, write_crossings_jsonl, CoincidenceReport, NodeEnvelopeGuide,
    NodeFunction, SectionGrid, SectionLayout,
};
use nodeqmc::nodeopt::{
    he_triplet_benchmark, li_hylleraas_basis, optimize_linear, optimize_variational, scan_node_parameter, LinearBudget,
    VariationalBudget,
};
use nodeqmc::qmc::{
    derive_seed, dmc_run, stream, timestep_extrapolate, vmc_run, DmcParams, DmcSummary, EnergyEstimate, VmcParams,
};
use nodeqmc::topology::{
    count_nodal_regions, rotation_path_test, tiling_spot_check, PathSearchBudget, PathVerdict, ReferencePoint,
    RegionCount, RegionStrategy, TilingReport,
};
use nodeqmc::wavefunction::{
    is_zero, HylleraasSeries, HylleraasWaveFunction, TrialWaveFunction, WaveFunctionFile, WaveFunctionSpec,
};

use crate::config::{
    CrossingsSection, DmcSection, OptimizeSection, ReferenceKind, RunConfig, ScanSection, TopologySection, VmcSection,
    WaveFunctionSource,
};
use crate::error::CliError;
use crate::output::{render, OutputSet};

fn missing(section: &str) -> CliError {
    CliError::Config(format!("this subcommand needs a [{section}] table"))
}

fn trial(config: &RunConfig) -> Result<Arc<dyn TrialWaveFunction>, CliError> {
    Ok(config.wave_function_file().build()?)
}

#[derive(Serialize)]
struct VmcReport {
    system: String,
    wave_function: String,
    energy: EnergyEstimate,
    variance: f64,
    mean_radius: EnergyEstimate,
    seed: u64,
}

pub fn vmc(config: &RunConfig, out: &mut OutputSet) -> Result<(), CliError> {
    let section: &VmcSection = config.vmc.as_ref().ok_or_else(|| missing("vmc"))?;
    let wf = trial(config)?;
    let r = vmc_run(
        wf.as_ref(),
        config.system.nuclear_charge(),
        &section.params(config.seed),
    )?;
    out.write_json(
        "vmc.json",
        &VmcReport {
            system: config.system.name().into(),
            wave_function: wf.label(),
            energy: r.energy,
            variance: r.variance,
            mean_radius: r.mean_radius,
            seed: config.seed,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct Extrapolated {
    energy: f64,
    error: f64,
    slope: f64,
    slope_error: f64,
    chi2: f64,
    dof: usize,
}

#[derive(Serialize)]
struct DmcReport {
    system: String,
    runs: Vec<DmcSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    extrapolated: Option<Extrapolated>,
}

pub fn dmc(config: &RunConfig, out: &mut OutputSet) -> Result<(), CliError> {
    let section: &DmcSection = config.dmc.as_ref().ok_or_else(|| missing("dmc"))?;
    let wf = trial(config)?;
    let node = config.node.function();
    let taus = section.taus();
    let mut runs = Vec::with_capacity(taus.len());
    let mut points = Vec::with_capacity(taus.len());
    for k in 0..taus.len() {
        let seed = if taus.len() == 1 {
            config.seed
        } else {
            derive_seed(config.seed, k as u64)
        };
        let params: DmcParams = section.params(k, seed);
        let r = dmc_run(wf.as_ref(), node.as_ref(), config.system.nuclear_charge(), &params)?;
        if section.write_trace {
            let bytes = render(|b| r.write_trace_csv(b))?;
            out.write_bytes(&format!("dmc_trace_{k}.csv"), &bytes)?;
        }
        points.push((r.tau_effective, r.energy));
        runs.push(r.summary(config.system.name()));
    }
    let extrapolated = if section.tau_ladder.is_some() {
        let fit = timestep_extrapolate(&points)?;
        Some(Extrapolated {
            energy: fit.intercept.mean,
            error: fit.intercept.error,
            slope: fit.slope,
            slope_error: fit.slope_error,
            chi2: fit.chi2,
            dof: fit.dof,
        })
    } else {
        None
    };
    out.write_json(
        "dmc.json",
        &DmcReport {
            system: config.system.name().into(),
            runs,
            extrapolated,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct SectionSummary {
    file: String,
    layout: SectionLayout,
    feasible_points: usize,
    zero_points: usize,
    sign_components: usize,
    /// Fraction of non-zero points whose sign equals `s × sign(t1 t2)` for
    /// the better of `s = ±1`.
    product_sign_agreement: f64,
    /// Diagonal quadrants next to the origin joined by same-sign cells.
    quadrants_connected: (bool, bool),
}

fn summarize(grid: &SectionGrid, spec: &nodeqmc::nodal::CrossSectionSpec, file: String) -> SectionSummary {
    let nonzero: Vec<_> = grid.points.iter().filter(|p| p.sign != 0).collect();
    let agree = nonzero
        .iter()
        .filter(|p| (p.t1 * p.t2).signum() as i8 == p.sign)
        .count();
    let n = nonzero.len().max(1) as f64;
    let fraction = (agree as f64 / n).max((nonzero.len() - agree) as f64 / n);
    let labels = grid.sign_components();
    let components = labels.iter().flatten().max().map_or(0, |m| m + 1);
    SectionSummary {
        file,
        layout: spec.layout.clone(),
        feasible_points: grid.points.iter().filter(|p| p.value.is_finite()).count(),
        zero_points: grid.points.iter().filter(|p| p.sign == 0).count(),
        sign_components: components,
        product_sign_agreement: if nonzero.is_empty() { 0.0 } else { fraction },
        quadrants_connected: grid.origin_quadrants_connected(spec),
    }
}

pub fn scan(config: &RunConfig, out: &mut OutputSet) -> Result<(), CliError> {
    let section: &ScanSection = config.scan.as_ref().ok_or_else(|| missing("scan"))?;
    let wf = trial(config)?;
    let layouts: Vec<SectionLayout> = match &section.layout {
        Some(l) => vec![l.clone()],
        None => (0..section.draws)
            .map(|k| SectionLayout::random_beryllium(&mut stream(config.seed, k as u64)))
            .collect(),
    };
    let mut summaries = Vec::with_capacity(layouts.len());
    for (k, layout) in layouts.into_iter().enumerate() {
        let spec = section.spec(layout);
        let grid = scan_cross_section(wf.as_ref(), &spec)?;
        let name = format!("scan_{k}.csv");
        out.write_bytes(&name, &render(|b| grid.write_csv(b))?)?;
        summaries.push(summarize(&grid, &spec, name));
    }
    out.write_json("scan.json", &summaries)?;
    Ok(())
}

#[derive(Serialize)]
struct TopologyReport {
    system: String,
    wave_function: String,
    /// The rotation path from `(r1, −r1, r3, −r3)`, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    rotation_check: Option<PathVerdict>,
    count: RegionCount,
    #[serde(skip_serializing_if = "Option::is_none")]
    tiling: Option<TilingReport>,
}

/// First non-zero sample of a short VMC run.
fn sampled_reference(
    wf: &dyn TrialWaveFunction,
    nuclear_charge: u32,
    seed: u64,
) -> Result<nodeqmc::configuration::ElectronConfiguration, CliError> {
    let r = vmc_run(
        wf,
        nuclear_charge,
        &VmcParams {
            n_steps: 256,
            step_size: 0.3,
            burn_in: 1000,
            seed,
            n_chains: 1,
            sample_every: 64,
            record_walk: false,
        },
    )?;
    r.samples.into_iter().find(|c| !is_zero(wf, c)).ok_or_else(|| {
        CliError::Runtime(nodeqmc::error::Error::InvalidConfiguration(
            "no usable reference".into(),
        ))
    })
}

pub fn topology(config: &RunConfig, out: &mut OutputSet) -> Result<(), CliError> {
    let section: &TopologySection = config.topology.as_ref().ok_or_else(|| missing("topology"))?;
    let wf = trial(config)?;
    let z = config.system.nuclear_charge();
    let search = PathSearchBudget {
        waypoints: section.waypoints,
        samples_per_segment: section.samples_per_segment,
        iterations: section.search_iterations,
        seed: derive_seed(config.seed, 1),
    };
    let rotation = match (&section.reference, wf.spins().len()) {
        (ReferenceKind::Rotation, 4) => Some(make_be_reference_point(Vec3::from(section.r1), Vec3::from(section.r3))?),
        _ => None,
    };
    let rotation_check = rotation
        .as_ref()
        .map(|r| rotation_path_test(wf.as_ref(), r, section.rotation_steps))
        .transpose()?;
    let reference_config = match &rotation {
        Some(r) if !is_zero(wf.as_ref(), &r.config) => r.config.clone(),
        _ => sampled_reference(wf.as_ref(), z, derive_seed(config.seed, 0))?,
    };
    let reference = ReferencePoint::new(wf.as_ref(), reference_config)?;
    let count = count_nodal_regions(
        wf.as_ref(),
        &reference,
        &RegionStrategy {
            rotation,
            rotation_steps: Some(section.rotation_steps),
            search: search.clone(),
        },
    )?;
    let tiling = (section.tiling_pairs > 0)
        .then(|| tiling_spot_check(wf.as_ref(), z, section.tiling_pairs, &search))
        .transpose()?;
    out.write_json(
        "topology.json",
        &TopologyReport {
            system: config.system.name().into(),
            wave_function: wf.label(),
            rotation_check,
            count,
            tiling,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct CrossingSummary {
    system: String,
    wave_function: String,
    node: String,
    non_coincident_fraction: f64,
    #[serde(flatten)]
    report: CoincidenceReport,
}

pub fn crossings(config: &RunConfig, out: &mut OutputSet) -> Result<(), CliError> {
    let section: &CrossingsSection = config.crossings.as_ref().ok_or_else(|| missing("crossings"))?;
    let wf = trial(config)?;
    let node = config
        .node
        .function()
        .ok_or_else(|| CliError::Config("crossings needs an explicit [node]".into()))?;
    let walk = vmc_run(
        wf.as_ref(),
        config.system.nuclear_charge(),
        &VmcParams {
            n_steps: section.n_steps,
            step_size: section.step_size,
            burn_in: section.burn_in,
            seed: config.seed,
            n_chains: 1,
            sample_every: 0,
            record_walk: true,
        },
    )?
    .walk;
    let report = crossing_coincidence(wf.as_ref(), &node, &walk, section.radius)?;
    out.write_bytes(
        "crossings.jsonl",
        &render(|b| write_crossings_jsonl(&report.non_coincident_records, b))?,
    )?;
    let mut summary = CrossingSummary {
        system: config.system.name().into(),
        wave_function: wf.label(),
        node: node.label(),
        non_coincident_fraction: report.non_coincident_fraction(),
        report,
    };
    summary.report.non_coincident_records.clear();
    out.write_json("crossings.json", &summary)?;
    Ok(())
}

/// Sets `wave_function.<name>` or `jastrow.<name>` in a copy of `file`.
fn with_parameters(
    file: &WaveFunctionFile,
    names: &[String],
    values: &[f64],
) -> nodeqmc::error::Result<WaveFunctionFile> {
    use nodeqmc::error::Error;
    let mut doc = toml::Value::try_from(file).map_err(|e| Error::Parse(e.to_string()))?;
    for (name, value) in names.iter().zip(values) {
        let mut target = &mut doc;
        let parts: Vec<&str> = name.split('.').collect();
        for part in &parts[..parts.len() - 1] {
            target = target
                .get_mut(*part)
                .ok_or_else(|| Error::InvalidParameter(format!("no table {part} for parameter {name}")))?;
        }
        let leaf = parts[parts.len() - 1];
        let slot = target
            .get_mut(leaf)
            .ok_or_else(|| Error::InvalidParameter(format!("no field {name} in the wave function")))?;
        if !slot.is_float() {
            return Err(Error::InvalidParameter(format!("{name} is not a real parameter")));
        }
        *slot = toml::Value::Float(*value);
    }
    doc.try_into().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))
}

fn write_wave_function(out: &mut OutputSet, name: &str, file: &WaveFunctionFile) -> Result<(), CliError> {
    out.write_bytes(name, file.to_toml()?.as_bytes())?;
    Ok(())
}

pub fn optimize(config: &RunConfig, out: &mut OutputSet) -> Result<(), CliError> {
    let section = config.optimize.as_ref().ok_or_else(|| missing("optimize"))?;
    let file = config.wave_function_file();
    let z = config.system.nuclear_charge();
    match section {
        OptimizeSection::NodeScan {
            a_values,
            refinements,
            zeta_inner,
            zeta_outer,
            tau,
            target_population,
            equilibration_steps,
            measurement_steps,
        } => {
            let jastrow = file.jastrow.map(|j| j.factor()).transpose()?;
            let guide_for = |node: &NodeFunction| -> nodeqmc::error::Result<Arc<dyn TrialWaveFunction>> {
                Ok(Arc::new(NodeEnvelopeGuide::beryllium(
                    node.clone(),
                    *zeta_inner,
                    *zeta_outer,
                    jastrow,
                )?))
            };
            let params = DmcParams {
                tau: *tau,
                target_population: *target_population,
                equilibration_steps: *equilibration_steps,
                measurement_steps: *measurement_steps,
                trial_energy_period: 10,
                seed: config.seed,
                vmc_step_size: 0.2,
                vmc_burn_in: 500,
            };
            let r = scan_node_parameter(&guide_for, a_values, z, &params, *refinements)?;
            out.write_bytes("optimize.csv", &render(|b| r.write_csv(b))?)?;
            out.write_json("optimize.json", &r)?;
        }
        OptimizeSection::Variational {
            parameters,
            rounds,
            max_evaluations,
            sampling,
        } => {
            let names = parameters.names();
            let family = |p: &[f64]| -> nodeqmc::error::Result<Arc<dyn TrialWaveFunction>> {
                with_parameters(file, &names, p)?.build()
            };
            let budget = VariationalBudget {
                sampling: sampling.params(config.seed),
                rounds: *rounds,
                max_evaluations: *max_evaluations,
                min_effective_fraction: 0.3,
            };
            let r = optimize_variational(&family, z, parameters, &budget)?;
            write_wave_function(out, "optimized.toml", &with_parameters(file, &names, &r.parameters)?)?;
            out.write_json("optimize.json", &r)?;
        }
        OptimizeSection::Linear {
            iterations,
            sampling,
            basis_order,
            alpha,
            beta,
            initial_guide,
        } => {
            let mut spec = file.wave_function.clone();
            if let Some(order) = basis_order {
                let (Some(a), Some(b)) = (alpha, beta) else {
                    return Err(CliError::Config("basis_order needs alpha and beta".into()));
                };
                if !matches!(spec, WaveFunctionSpec::LiHylleraas { .. }) {
                    return Err(CliError::Config("basis_order applies to li_hylleraas functions".into()));
                }
                spec = WaveFunctionSpec::LiHylleraas {
                    terms: li_hylleraas_basis(*order, *a, *b),
                };
            }
            let wf = match &spec {
                WaveFunctionSpec::LiHylleraas { terms } => {
                    HylleraasWaveFunction::lithium(HylleraasSeries::new(3, terms.clone())?)?
                }
                WaveFunctionSpec::HeTriplet { alpha, beta, terms } => {
                    HylleraasWaveFunction::he_triplet(terms, *alpha, *beta)?
                }
                _ => {
                    return Err(CliError::Config(
                        "linear optimization needs a Hylleraas expansion".into(),
                    ))
                }
            };
            let guide = match initial_guide {
                Some(WaveFunctionSource::Inline(g)) => Some(g.build()?),
                _ => None,
            };
            let budget = LinearBudget {
                sampling: sampling.params(config.seed),
                iterations: *iterations,
            };
            let r = optimize_linear(&wf, z, guide, &budget)?;
            let coefficients: Vec<f64> = r.wave_function.series().terms().iter().map(|t| t.coefficient).collect();
            let spec = match spec {
                WaveFunctionSpec::LiHylleraas { mut terms } => {
                    for (t, c) in terms.iter_mut().zip(&coefficients) {
                        t.coefficient = *c;
                    }
                    WaveFunctionSpec::LiHylleraas { terms }
                }
                WaveFunctionSpec::HeTriplet { alpha, beta, mut terms } => {
                    for (t, c) in terms.iter_mut().zip(&coefficients) {
                        t.3 = *c;
                    }
                    WaveFunctionSpec::HeTriplet { alpha, beta, terms }
                }
                _ => unreachable!(),
            };
            write_wave_function(
                out,
                "optimized.toml",
                &WaveFunctionFile {
                    wave_function: spec,
                    jastrow: None,
                },
            )?;
            #[derive(Serialize)]
            struct LinearReport {
                energies: Vec<EnergyEstimate>,
                eigenvalues: Vec<f64>,
            }
            out.write_json(
                "optimize.json",
                &LinearReport {
                    energies: r.energies,
                    eigenvalues: r.eigenvalues,
                },
            )?;
        }
        OptimizeSection::Benchmark { order } => {
            let b = he_triplet_benchmark(*order)?;
            let s = &b.solution;
            let terms = s.rows.clone();
            write_wave_function(
                out,
                "optimized.toml",
                &WaveFunctionFile {
                    wave_function: WaveFunctionSpec::HeTriplet {
                        alpha: s.alpha,
                        beta: s.beta,
                        terms,
                    },
                    jastrow: None,
                },
            )?;
            out.write_json("optimize.json", &b)?;
        }
    }
    Ok(())
}
