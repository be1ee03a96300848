use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fermidyn_cli::output::load_csv;
use fermidyn_cli::{load_config, run, RunOptions};

const HOPPING: &str = r#"
modes = 2
hamiltonian = "lambda*(c(2)*c'(1) + c(1)*c'(2))"
initial = [1, 0]
t_end = 10
samples = 1001

[param]
lambda = 1
"#;

const TRIAD: &str = r#"
modes = 3
hamiltonian = "lambda*(c'(1)*c'(2)*c(3) + c'(3)*c(2)*c(1))"
initial = [1, 1, 0]
t_end = 20
samples = 401
verify = true

[param]
lambda = 1
"#;

fn fermidyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermidyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn hopping_csv_follows_cos_squared() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "hopping.toml", HOPPING);
    let out = fermidyn(&["run", &config]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // default output sits next to the config
    let csv = dir.path().join("hopping.csv");
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,n1,n2\n"));
    let (times, densities) = load_csv(&csv).unwrap();
    assert_eq!(times.len(), 1001);
    for (k, &t) in times.iter().enumerate() {
        assert!((densities[0][k] - t.cos().powi(2)).abs() <= 1e-10);
        assert!((densities[1][k] - t.sin().powi(2)).abs() <= 1e-10);
    }
}

#[test]
fn non_hermitian_hamiltonian_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let text = HOPPING.replace("lambda*(c(2)*c'(1) + c(1)*c'(2))", "c(1)");
    let config = write_config(dir.path(), "bad.toml", &text);
    let out = fermidyn(&["run", &config]);
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("not Hermitian") && stderr.contains("1e0"),
        "{stderr}"
    );
    assert!(!dir.path().join("bad.csv").exists());
}

#[test]
fn triad_verify_reports_conserved_combinations() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "triad.toml", TRIAD);
    let svg = dir.path().join("triad.svg");
    let out = fermidyn(&[
        "run",
        &config,
        "--svg",
        svg.to_str().unwrap(),
        "--list-conserved",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("conserved combinations of n1..n3: 2"),
        "{stdout}"
    );
    assert!(stdout.contains("(0.707107, 0.000000, 0.707107)"));
    assert!(stdout.contains("(0.000000, 0.707107, 0.707107)"));
    assert!(stdout.contains("verify: ok"));
    assert!(stdout.contains("orthonormal basis"));
    assert!(fs::read_to_string(svg).unwrap().contains("<polyline"));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (HOPPING.replace("[1, 0]", "[2, 0]"), 2, "line 4"),
        (HOPPING.replace("c(1)*c'(2))", "c(1)*c'(2)"), 3, "column"),
        (HOPPING.replace("lambda = 1", "mu = 1"), 2, "lambda"),
        (HOPPING.replace("c'(2)", "c'(3)"), 3, "mode 3"),
    ];
    for (k, (text, code, needle)) in cases.iter().enumerate() {
        let config = write_config(dir.path(), &format!("case{k}.toml"), text);
        let out = fermidyn(&["run", &config]);
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(*code), "case {k}: {stderr}");
        assert!(stderr.contains(needle), "case {k}: {stderr}");
    }
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        fermidyn(&["run", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn csv_reingestion_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("triad.toml");
    fs::write(&config_path, TRIAD.replace("verify = true\n", "")).unwrap();
    let config = load_config(&config_path).unwrap();
    let mut stdout = Vec::new();
    let outcome = run(
        &config,
        &dir.path().join("out.csv"),
        &RunOptions::default(),
        &mut stdout,
    )
    .unwrap();
    let (times, densities) = load_csv(&outcome.csv_path).unwrap();
    assert_eq!(times, outcome.table.times);
    for (read, held) in densities.iter().zip(&outcome.table.densities) {
        for (a, b) in read.iter().zip(held) {
            assert_eq!(a.to_bits(), (b + 0.0).to_bits());
        }
    }
    assert!(outcome.crosscheck.is_none());
}

#[test]
fn flags_override_config_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("csv = \"from_config.csv\"\n{HOPPING}");
    let config = write_config(dir.path(), "h.toml", &text);
    assert!(fermidyn(&["run", &config]).status.success());
    assert!(dir.path().join("from_config.csv").exists());
    let flag = dir.path().join("from_flag.csv");
    assert!(
        fermidyn(&["run", &config, "--csv", flag.to_str().unwrap(), "--verify"])
            .status
            .success()
    );
    assert!(flag.exists());
}
