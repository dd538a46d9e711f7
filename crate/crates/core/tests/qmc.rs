//! Monte Carlo invariants: zero variance for an exact eigenfunction, the
//! fixed-node upper bound, and bitwise independence of the thread count.

use std::path::PathBuf;
use std::sync::Arc;

use nodeqmc::nodal::NodeFunction;
use nodeqmc::qmc::{dmc_run, vmc_run, DmcParams, DmcResult, VmcParams, VmcResult};
use nodeqmc::wavefunction::{build_hydrogenic, load_wave_function, TrialWaveFunction};

/// Nonrelativistic energy of the lowest ³S state of helium.
const HE_TRIPLET_EXACT: f64 = -2.175_229_378;

fn shipped(name: &str) -> Arc<dyn TrialWaveFunction> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../wavefunctions")
        .join(name);
    load_wave_function(&path).unwrap().build().unwrap()
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn vmc(seed: u64) -> VmcParams {
    VmcParams {
        n_steps: 2000,
        step_size: 0.3,
        burn_in: 200,
        seed,
        n_chains: 16,
        sample_every: 0,
        record_walk: false,
    }
}

fn dmc(seed: u64, tau: f64, steps: usize) -> DmcParams {
    DmcParams {
        tau,
        target_population: 200,
        equilibration_steps: steps / 4,
        measurement_steps: steps,
        trial_energy_period: 10,
        seed,
        vmc_step_size: 0.3,
        vmc_burn_in: 200,
    }
}

#[test]
fn exact_eigenfunction_has_zero_variance() {
    for z in [1u32, 2, 3] {
        let zeta = f64::from(z);
        let wf = build_hydrogenic(zeta).unwrap();
        let r = vmc_run(
            &wf,
            z,
            &VmcParams {
                step_size: 0.5 / zeta,
                ..vmc(3)
            },
        )
        .unwrap();
        assert!(r.variance < 1e-10, "Z = {z}: variance {}", r.variance);
        assert!(
            (r.energy.mean + 0.5 * zeta * zeta).abs() < 1e-10,
            "Z = {z}: {:?}",
            r.energy
        );
    }
}

#[test]
fn fixed_node_energy_is_an_upper_bound() {
    let guide = shipped("he_triplet_seed.toml");
    let r = dmc_run(
        guide.as_ref(),
        Some(&NodeFunction::ExactTriplet),
        2,
        &dmc(17, 0.01, 4000),
    )
    .unwrap();
    assert!(
        r.energy.mean + 3.0 * r.energy.error >= HE_TRIPLET_EXACT,
        "{:?}",
        r.energy
    );
    // and well below the variational energy of the one-term guide
    let v = vmc_run(guide.as_ref(), 2, &vmc(17)).unwrap();
    assert!(r.energy.mean < v.energy.mean, "{} vs {}", r.energy.mean, v.energy.mean);
}

fn same_vmc(a: &VmcResult, b: &VmcResult) {
    assert_eq!(a.energy.mean.to_bits(), b.energy.mean.to_bits());
    assert_eq!(a.energy.error.to_bits(), b.energy.error.to_bits());
    assert_eq!(a.variance.to_bits(), b.variance.to_bits());
}

fn same_dmc(a: &DmcResult, b: &DmcResult) {
    assert_eq!(a.energy.mean.to_bits(), b.energy.mean.to_bits());
    assert_eq!(a.tau_effective.to_bits(), b.tau_effective.to_bits());
    assert_eq!(a.trace, b.trace);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let li = shipped("li_rhf_guide.toml");
    let v1 = in_pool(1, || vmc_run(li.as_ref(), 3, &vmc(9)).unwrap());
    let v3 = in_pool(3, || vmc_run(li.as_ref(), 3, &vmc(9)).unwrap());
    same_vmc(&v1, &v3);

    let p = dmc(9, 0.01, 400);
    let d1 = in_pool(1, || dmc_run(li.as_ref(), Some(&NodeFunction::LiRhf), 3, &p).unwrap());
    let d4 = in_pool(4, || dmc_run(li.as_ref(), Some(&NodeFunction::LiRhf), 3, &p).unwrap());
    same_dmc(&d1, &d4);
}
