use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use periodik::io::{read_signal_file, write_json, write_signal_file, SynthConfig};
use periodik::signal::{synthesize, NoiseFamily, NoiseSpec, SignalModel};
use tempfile::TempDir;

fn periodik(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_periodik"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn single_tone(dir: &TempDir, m: usize) -> std::path::PathBuf {
    let model = SignalModel::new(vec![1.0], vec![Complex64::new(2.0, 0.0)]).unwrap();
    let signal = synthesize(&model, &NoiseSpec::none(), m).unwrap();
    let path = dir.path().join("tone.csv");
    write_signal_file(&path, &signal).unwrap();
    path
}

#[test]
fn estimate_noiseless_fixture_finds_one_component() {
    let dir = TempDir::new().unwrap();
    let signal = single_tone(&dir, 200);
    let out = periodik(&["estimate", "--signal", path_str(&signal), "--m", "200"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["N_hat"], 1);
    assert_eq!(report["components"].as_array().unwrap().len(), 1);
}

#[test]
fn dirichlet_schedule_line() {
    let out = periodik(&["schedule", "--scheme", "dirichlet-example", "--m", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("J=56"), "{}", stdout(&out));
}

#[test]
fn missing_signal_is_a_configuration_error() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = periodik(&["estimate", "--signal", path_str(&missing), "--m", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn short_signal_is_a_precondition_error() {
    let dir = TempDir::new().unwrap();
    let signal = single_tone(&dir, 50);
    let out = periodik(&["estimate", "--signal", path_str(&signal), "--m", "100"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_subcommand_exits_two() {
    assert_eq!(periodik(&["transmogrify"]).status.code(), Some(2));
}

#[test]
fn synth_then_estimate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let config = SynthConfig {
        model: SignalModel::new(
            vec![0.0, std::f64::consts::FRAC_PI_2],
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.5)],
        )
        .unwrap(),
        noise: NoiseSpec::new(NoiseFamily::SymmetricPareto { a: 1.5 }, 9),
        m: 300,
    };
    let cfg = dir.path().join("synth.json");
    write_json(&cfg, &config).unwrap();

    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for p in [&first, &second] {
        let out = periodik(&["synth", "--config", path_str(&cfg), "--out", path_str(p)]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());

    let library = synthesize(&config.model, &config.noise, config.m).unwrap();
    assert_eq!(read_signal_file(&first).unwrap().samples(), library.samples());

    let run = |p: &Path| {
        stdout(&periodik(&[
            "estimate",
            "--signal",
            path_str(p),
            "--m",
            "300",
            "--mode",
            "two-stage",
            "--grid-mode",
            "detect",
        ]))
    };
    let a = run(&first);
    assert!(!a.is_empty());
    assert_eq!(a, run(&second));
}

#[test]
fn hausdorff_of_quarter_turn() {
    let out = periodik(&["hausdorff", "--a", "0", "--b", "1.5707963267948966"]);
    assert_eq!(out.status.code(), Some(0));
    let value: f64 = stdout(&out).trim().parse().unwrap();
    assert!((value - 2f64.sqrt()).abs() < 1e-12);
}
