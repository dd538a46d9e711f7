//! End-to-end behaviour of the `nodeqmc` binary: exit codes, manifests,
//! reproducibility and the shape of each subcommand's output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn wave_function(name: &str) -> String {
    root().join("wavefunctions").join(name).display().to_string()
}

fn nodeqmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodeqmc")).args(args).output().unwrap()
}

/// Writes `body` as a config in `dir` with the output set to `dir/out`.
fn config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    let out = dir.join("out");
    fs::write(&path, format!("output = {:?}\n{body}", out.display().to_string())).unwrap();
    path
}

fn run_ok(args: &[&str]) -> PathBuf {
    let o = nodeqmc(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    PathBuf::from(String::from_utf8(o.stdout).unwrap().trim())
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn vmc_config(dir: &Path) -> PathBuf {
    config(
        dir,
        "vmc.toml",
        &format!(
            r#"system = "li"
wave_function = "{}"
seed = 5

[vmc]
n_steps = 2000
step_size = 0.2
n_chains = 8
"#,
            wave_function("li_rhf_guide.toml")
        ),
    )
}

fn scan_config(dir: &Path) -> PathBuf {
    config(
        dir,
        "scan.toml",
        &format!(
            r#"system = "be"
wave_function = "{}"
seed = 2

[scan]
t1_max = 1.0
t2_max = 1.0
n1 = 32
n2 = 32
draws = 2
"#,
            wave_function("be_hf.toml")
        ),
    )
}

/// Outputs listed in a manifest, keyed by name, manifest excluded.
fn outputs(manifest: &Path) -> Vec<(String, Vec<u8>)> {
    let m = json(manifest);
    let dir = manifest.parent().unwrap();
    m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|n| {
            let n = n.as_str().unwrap().to_string();
            let bytes = fs::read(dir.join(&n)).unwrap();
            (n, bytes)
        })
        .collect()
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let unknown = config(
        dir.path(),
        "unknown.toml",
        "system = \"li\"\nwave_function = \"x.toml\"\nseed = 1\ncolour = 3\n",
    );
    let o = nodeqmc(&["vmc", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));

    let missing = dir.path().join("absent.toml");
    assert_eq!(nodeqmc(&["vmc", missing.to_str().unwrap()]).status.code(), Some(2));

    // Li function for a Be run
    let mismatch = config(
        dir.path(),
        "mismatch.toml",
        &format!(
            "system = \"be\"\nwave_function = \"{}\"\nseed = 1\n[vmc]\nn_steps = 100\nstep_size = 0.2\n",
            wave_function("li_rhf.toml")
        ),
    );
    assert_eq!(nodeqmc(&["vmc", mismatch.to_str().unwrap()]).status.code(), Some(2));

    let vmc = vmc_config(dir.path());
    assert_eq!(
        nodeqmc(&["--workers", "0", "vmc", vmc.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert!(!dir.path().join("out").exists());
}

#[test]
fn scan_resolution_one_is_rejected() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(scan_config(dir.path()))
        .unwrap()
        .replace("n1 = 32", "n1 = 1");
    let path = dir.path().join("coarse.toml");
    fs::write(&path, text).unwrap();
    let o = nodeqmc(&["scan", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resolution"));
}

#[test]
fn runtime_failures_exit_with_three() {
    let dir = TempDir::new().unwrap();
    let path = config(
        dir.path(),
        "bad_parameter.toml",
        &format!(
            r#"system = "li"
wave_function = "{}"
seed = 1

[optimize]
method = "variational"
rounds = 1

[optimize.parameters]
parameters = [{{ name = "wave_function.no_such_field", lower = 0.1, upper = 1.0, initial = 0.5 }}]

[optimize.sampling]
n_steps = 200
step_size = 0.2
n_chains = 4
sample_every = 2
"#,
            wave_function("li_rhf_guide.toml")
        ),
    );
    let o = nodeqmc(&["optimize", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn manifest_records_config_seed_and_version() {
    let dir = TempDir::new().unwrap();
    let manifest = run_ok(&["vmc", vmc_config(dir.path()).to_str().unwrap()]);
    assert_eq!(manifest.file_name().unwrap(), "vmc.manifest.json");
    let m = json(&manifest);
    assert_eq!(m["tool"], "nodeqmc");
    assert_eq!(m["subcommand"], "vmc");
    assert_eq!(m["seed"], 5);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    // the wave function is inlined so the manifest is self-contained
    assert_eq!(m["config"]["wave_function"]["wave_function"]["kind"], "li_rhf");
    assert_eq!(m["outputs"], serde_json::json!(["vmc.json"]));
    let summary = json(&manifest.with_file_name("vmc.json"));
    assert!(summary["energy"]["mean"].as_f64().unwrap() < -7.3);
}

#[test]
fn reruns_reproduce_outputs_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let cfg = scan_config(dir.path());
    let first = run_ok(&["scan", cfg.to_str().unwrap()]);
    let a = outputs(&first);
    assert_eq!(a.len(), 3);

    let again = dir.path().join("again");
    let second = run_ok(&["--output", again.to_str().unwrap(), "scan", cfg.to_str().unwrap()]);
    assert_eq!(a, outputs(&second));

    // a manifest is itself a valid config
    let from_manifest = dir.path().join("from_manifest");
    let third = run_ok(&[
        "--output",
        from_manifest.to_str().unwrap(),
        "scan",
        first.to_str().unwrap(),
    ]);
    assert_eq!(a, outputs(&third));
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = TempDir::new().unwrap();
    let cfg = vmc_config(dir.path());
    let one = dir.path().join("one");
    let two = dir.path().join("two");
    let m1 = run_ok(&[
        "--workers",
        "1",
        "--output",
        one.to_str().unwrap(),
        "vmc",
        cfg.to_str().unwrap(),
    ]);
    let m2 = run_ok(&[
        "--workers",
        "2",
        "--output",
        two.to_str().unwrap(),
        "vmc",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(outputs(&m1), outputs(&m2));
}

#[test]
fn tau_ladder_adds_an_extrapolated_entry() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        dir.path(),
        "dmc.toml",
        &format!(
            r#"system = "he_triplet"
wave_function = "{}"
seed = 4

[node]
kind = "exact_triplet"

[dmc]
tau = 0.02
target_population = 100
equilibration_steps = 100
measurement_steps = 200
write_trace = true
"#,
            wave_function("he_triplet_seed.toml")
        ),
    );
    let single = run_ok(&["dmc", cfg.to_str().unwrap()]);
    let s = json(&single.with_file_name("dmc.json"));
    assert_eq!(s["runs"].as_array().unwrap().len(), 1);
    assert!(s.get("extrapolated").is_none());

    let ladder = dir.path().join("ladder");
    let m = run_ok(&[
        "--output",
        ladder.to_str().unwrap(),
        "dmc",
        "--tau-ladder",
        "0.02,0.01",
        cfg.to_str().unwrap(),
    ]);
    let d = json(&m.with_file_name("dmc.json"));
    let runs = d["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    // equal imaginary time at both steps
    assert_eq!(runs[1]["steps"], 400);
    let e = &d["extrapolated"];
    assert!(e["energy"].as_f64().unwrap() < -2.1 && e["error"].as_f64().unwrap() > 0.0);
    assert!(ladder.join("dmc_trace_1.csv").exists());
    assert_eq!(json(&m)["config"]["dmc"]["tau_ladder"], serde_json::json!([0.02, 0.01]));
}

#[test]
fn topology_counts_regions_of_shipped_functions() {
    let dir = TempDir::new().unwrap();
    for (cfg, regions, exact) in [
        ("be_two_config_topology.toml", 2, true),
        ("be_hf_topology.toml", 4, false),
    ] {
        let out = dir.path().join(cfg);
        let path = root().join("configs").join(cfg);
        let m = run_ok(&["--output", out.to_str().unwrap(), "topology", path.to_str().unwrap()]);
        let t = json(&m.with_file_name("topology.json"));
        assert_eq!(t["count"]["regions"], regions, "{cfg}");
        assert_eq!(t["count"]["exact"], exact, "{cfg}");
    }
}

#[test]
fn li_rhf_crossings_all_coincide() {
    let dir = TempDir::new().unwrap();
    let path = root().join("configs/li_rhf_crossings.toml");
    let m = run_ok(&[
        "--output",
        dir.path().to_str().unwrap(),
        "crossings",
        path.to_str().unwrap(),
    ]);
    let c = json(&m.with_file_name("crossings.json"));
    assert!(c["segments"].as_u64().unwrap() >= 100_000);
    assert!(c["total_crossings"].as_u64().unwrap() > 0);
    assert_eq!(c["non_coincident"], 0);
    assert_eq!(fs::read_to_string(dir.path().join("crossings.jsonl")).unwrap(), "");
}
