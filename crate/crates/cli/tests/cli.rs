use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_liouville-blocks"));
    c.env_remove("LIOUVILLE_BLOCKS_THREADS");
    c
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn run_example(name: &str, out: &Path) -> Output {
    bin()
        .args(["run", "--config"])
        .arg(example(name))
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn check_symmetry(config: &Path) -> String {
    let out = bin().args(["check-symmetry", "--config"]).arg(config).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn two_spin_run_writes_trajectory_and_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_example("two_spins_fig2.json", dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,P11,P00,C0,C1,C2"));
    assert_eq!(lines.count(), 201);

    let report = read_json(&dir.path().join("report.json"));
    let sizes: Vec<u64> = ["-2", "-1", "0", "1", "2"]
        .iter()
        .map(|d| report["blocks"]["sizes"][d].as_u64().unwrap())
        .collect();
    assert_eq!(sizes, [1, 4, 6, 4, 1]);
    assert_eq!(report["blocks"]["offblock_norm"].as_f64(), Some(0.0));
    assert_eq!(report["symmetry"]["number_symmetric"], Value::Bool(true));
    assert_eq!(report["steady_state"]["unique"], Value::Bool(true));
    assert_eq!(report["provenance"]["mode"], "partial");
}

#[test]
fn two_spin_coherences_outside_zero_block_stay_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_example("two_spins_fig2.json", dir.path()).status.success());
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut c0_max: f64 = 0.0;
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[4], 0.0);
        assert_eq!(v[5], 0.0);
        c0_max = c0_max.max(v[3].abs());
    }
    assert!(c0_max > 1e-3);
}

#[test]
fn two_boson_gaussian_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_example("two_bosons.json", dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let g = read_json(&dir.path().join("gaussian.json"));
    assert_eq!(g["block_dims"], serde_json::json!([3, 4]));
    assert_eq!(g["offblock_norm"].as_f64(), Some(0.0));
    let moments = g["steady_moments"].as_array().unwrap();
    assert_eq!(moments.len(), 10);
    for m in moments {
        let label = m["label"].as_str().unwrap();
        let [re, im] = [m["value"][0].as_f64().unwrap(), m["value"][1].as_f64().unwrap()];
        let creators = label.matches('+').count();
        if creators != 1 {
            assert_eq!((re, im), (0.0, 0.0), "{label}");
        } else if label == "a1+a2" {
            assert!(re.hypot(im) > 1e-7, "{label}");
        }
    }
}

#[test]
fn malformed_times_rejected_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{
          "system": { "type": "two_spins", "omega1": 1.0, "omega2": 1.0, "lambda": 0.01 },
          "baths": [{ "mu": 0.03, "temperature": 1.0, "cutoff": 10.0, "channels": ["sigma1x"] }],
          "initial_state": { "type": "basis_state", "occupation": [1, 1] },
          "times": [0.0, 2.0, 1.0],
          "outputs": ["trajectory"]
        }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("times[2]"));
    assert!(!out_dir.exists());
}

#[test]
fn unknown_field_reports_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{ "system": { "type": "bosons", "energies": [1.0], "n_max": 2 },
             "baths": [{ "mu": 0.03, "temperature": 1.0, "cutoff": 10.0, "chanels": ["x1"] }] }"#,
    )
    .unwrap();
    let out = bin().args(["check-symmetry", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("baths[0]"));
}

#[test]
fn unknown_channel_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{ "system": { "type": "bosons", "energies": [1.0], "n_max": 2 },
             "baths": [{ "mu": 0.03, "temperature": 1.0, "cutoff": 10.0, "channels": ["x2"] }] }"#,
    )
    .unwrap();
    let out = bin().args(["check-symmetry", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("baths[0].channels[0]"));
}

#[test]
fn symmetry_check_partial_secular_passes() {
    let text = check_symmetry(&example("two_spins_fig2.json"));
    assert!(text.contains("‖[N, L]‖_max = 0.000e0  PASS"), "{text}");
    assert!(text.contains("consistent with prediction"), "{text}");
}

#[test]
fn symmetry_check_without_secular_approximation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(example("two_spins_fig2.json")).unwrap();
    let cfg = dir.path().join("none.json");
    std::fs::write(&cfg, src.replace(r#""mode": "partial""#, r#""mode": "none""#)).unwrap();
    let text = check_symmetry(&cfg);
    let number = text.lines().find(|l| l.starts_with("number")).unwrap();
    assert!(number.ends_with("FAIL"), "{text}");
    assert!(text.contains("not expected"), "{text}");
    assert!(text.contains("consistent with prediction"), "{text}");
}

#[test]
fn symmetry_check_squeezed_keeps_parity_only() {
    let text = check_symmetry(&example("squeezed_demo.json"));
    let line = |p: &str| text.lines().find(|l| l.starts_with(p)).unwrap().to_string();
    assert!(line("number").ends_with("FAIL"), "{text}");
    assert!(line("parity").ends_with("PASS"), "{text}");
}

#[test]
fn local_generator_leaks_between_blocks() {
    let text = check_symmetry(&example("local_vs_global.json"));
    assert!(text.lines().find(|l| l.starts_with("number")).unwrap().ends_with("FAIL"));
    assert!(text.lines().find(|l| l.starts_with("parity")).unwrap().ends_with("PASS"));
}

#[test]
fn spin_chain_example_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_example("spin_chain_m3.json", dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,P000,P001,P010,P011,P100,P101,P110,P111\n"));
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["blocks"]["sizes"]["0"].as_u64(), Some(20));
}

#[test]
fn reports_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for name in ["two_spins_fig2.json", "two_bosons.json"] {
        assert!(run_example(name, a.path()).status.success());
        assert!(run_example(name, b.path()).status.success());
        for file in std::fs::read_dir(a.path()).unwrap() {
            let file = file.unwrap().file_name();
            let x = std::fs::read(a.path().join(&file)).unwrap();
            let y = std::fs::read(b.path().join(&file)).unwrap();
            assert!(x == y, "{name}: {file:?} differs between runs");
        }
    }
}

#[test]
fn random_graded_needs_seed_and_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("random.json");
    std::fs::write(&cfg, r#"{ "system": { "type": "random_graded" } }"#).unwrap();
    let no_seed = bin().args(["check-symmetry", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(no_seed.status.code(), Some(2));
    for seed in ["1", "2", "3"] {
        let out = bin()
            .args(["check-symmetry", "--seed", seed, "--tol", "1e-10", "--config"])
            .arg(&cfg)
            .output()
            .unwrap();
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.lines().find(|l| l.starts_with("number")).unwrap().ends_with("PASS"), "{text}");
    }
}

#[test]
fn block_dims_listing() {
    let out = bin().args(["block-dims", "--modes", "3"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for expected in ["d = -3: 1", "d = -1: 15", "d = +0: 20", "d = +2: 6", "total: 64", "delta = +2: 6", "delta =  0: 9"] {
        assert!(text.contains(expected), "missing `{expected}` in\n{text}");
    }
}

#[test]
fn invalid_thread_count_rejected() {
    let out = bin()
        .env("LIOUVILLE_BLOCKS_THREADS", "zero")
        .args(["block-dims", "--modes", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let ok = bin()
        .env("LIOUVILLE_BLOCKS_THREADS", "2")
        .args(["block-dims", "--modes", "2"])
        .output()
        .unwrap();
    assert!(ok.status.success());
}

#[test]
fn singular_gaussian_block_exits_numerical() {
    // A vanishing coupling leaves the number sector without damping.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("singular.json");
    std::fs::write(
        &cfg,
        r#"{ "system": { "type": "bosons", "energies": [1.0], "n_max": 2 },
             "baths": [{ "mu": 1e-300, "temperature": 1.0, "cutoff": 10.0, "channels": ["x1"] }],
             "psa": { "tau_r": 1.0 },
             "outputs": ["gaussian"] }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!out_dir.exists());
}
