use std::fs;
use std::path::Path;
use std::process::Command;

use phonon_quench::{execute, Invocation, Mode};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phonon-quench"))
}

fn run_cli(dir: &Path, mode: &str, config: &str, out: &str) -> std::process::Output {
    let path = dir.join(format!("{out}.conf"));
    fs::write(&path, config).unwrap();
    binary()
        .args([mode, "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.join(out))
        .output()
        .unwrap()
}

const SMALL_QUENCH: &str = "lattice.sites = 4\ncouplings.ratio = 0.7\nquench.samples = 60\n";
const SMALL_SWEEP: &str = "lattice.sites = 4\nsweep.ratios = 0.05, 0.3, 0.7, 2\nquench.samples = 80\n";

#[test]
fn quench_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = run_cli(dir.path(), "quench", SMALL_QUENCH, out);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["quench.csv", "quench.svg"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs");
    }
    let csv = fs::read_to_string(dir.path().join("a/quench.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t_u,n_i0,density,count_rate"));
    assert_eq!(csv.lines().count(), 61);
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<Vec<u8>> = [1, 3]
        .into_iter()
        .map(|w| {
            let outcome = execute(&Invocation {
                mode: Some(Mode::Sweep),
                config_text: SMALL_SWEEP.into(),
                out: Some(dir.path().join(format!("w{w}"))),
                workers: Some(w),
            })
            .unwrap();
            fs::read(outcome.out_dir.join("sweep.csv")).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert_eq!(text.lines().next(), Some("j_over_u,n_i0_variation,count_rate_variation,n_i0_mean"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn manifest_reruns_reproduce_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = "run.mode = quench\nlattice.sites = 4\nquench.samples = 40\ntrap.ion_spacing = 2.2e-5\n";
    let first = execute(&Invocation {
        config_text: config.into(),
        out: Some(dir.path().join("first")),
        workers: Some(1),
        ..Invocation::default()
    })
    .unwrap();
    let manifest = fs::read_to_string(first.out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("# defaults:"));
    assert!(manifest.contains("quench.t_max = 20  # default"));
    let second = execute(&Invocation {
        config_text: manifest,
        out: Some(dir.path().join("second")),
        workers: Some(1),
        ..Invocation::default()
    })
    .unwrap();
    for file in ["quench.csv", "quench.svg"] {
        assert_eq!(
            fs::read(first.out_dir.join(file)).unwrap(),
            fs::read(second.out_dir.join(file)).unwrap(),
            "{file} differs after re-run from manifest"
        );
    }
    let csv = fs::read_to_string(first.out_dir.join("quench.csv")).unwrap();
    assert!(csv.starts_with("t_seconds,t_u,n_i0,density,count_rate\n"));
}

#[test]
fn hopping_zero_gives_constant_zero_population() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_cli(dir.path(), "quench", "couplings.hopping = 0\ncouplings.interaction = 235\nquench.samples = 30\n", "mott");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("mott/quench.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let n_i0 = line.split(',').nth(1).unwrap();
        assert_eq!(n_i0, "0.00000000000e0");
    }
}

#[test]
fn derive_prints_couplings_and_validity() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_cli(dir.path(), "derive", "", "derive");
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("omega_x") && stdout.contains("beta_x") && stdout.contains("number_conservation"));
    let validity = fs::read_to_string(dir.path().join("derive/validity.csv")).unwrap();
    assert_eq!(validity.lines().filter(|l| l.ends_with(",pass")).count(), 4);
}

#[test]
fn ground_writes_crossover_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_cli(dir.path(), "ground", "lattice.sites = 4\nsweep.ratios = 0.01, 0.1, 1, 3\n", "ground");
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("ground/crossover.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("j_over_u,delta_avg,delta_central,gap_over_u"));
    let delta: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(delta.windows(2).all(|w| w[1] >= w[0]));
    assert!(dir.path().join("ground/crossover.svg").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = run_cli(dir.path(), "quench", "lattice.sitez = 4\n", "unknown");
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("lattice.sites"));
    assert!(!dir.path().join("unknown").exists());

    let range = run_cli(dir.path(), "quench", "lattice.sites = 5\nquench.site = 9\n", "range");
    assert_eq!(range.status.code(), Some(2));

    let conflict = run_cli(dir.path(), "quench", "run.mode = sweep\n", "conflict");
    assert_eq!(conflict.status.code(), Some(2));

    // sector dimension far beyond the basis cap
    let sizing = run_cli(dir.path(), "quench", "lattice.sites = 30\nlattice.phonons = 30\n", "sizing");
    assert_eq!(sizing.status.code(), Some(3));
    assert!(!dir.path().join("sizing").exists());

    let missing = binary().args(["quench", "--config"]).arg(dir.path().join("nope.conf")).output().unwrap();
    assert_eq!(missing.status.code(), Some(4));

    let blocked = dir.path().join("blocked");
    fs::write(&blocked, "a file, not a directory").unwrap();
    let io = run_cli(dir.path(), "derive", "", "blocked");
    assert_eq!(io.status.code(), Some(4));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    fs::write(&conf, "").unwrap();
    let target = dir.path().join("from-env");
    let o = binary()
        .args(["derive", "--config"])
        .arg(&conf)
        .env("PHONON_QUENCH_OUT", &target)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(target.join("couplings.csv").exists());
    assert!(target.join("manifest.txt").exists());
}
