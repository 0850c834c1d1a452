use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use superlab_cli::config::Config;
use superlab_cli::run::{sweep_row, threshold_point, SweepSpec};
use superlab_cli::ModelKind;

fn superlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superlab"))
        .args(args)
        .env("SUPERLAB_OUT", out)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const SWEEP: &str = "\
mode = threshold_vs_omega0
omega = 100
gamma_d = 59
delta = 0
models = ideal, decay, doppler
gamma = 20
sweep_start = -100
sweep_stop = 400
sweep_points = 26
";

#[test]
fn validate_empty_file_echoes_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "empty.cfg", "");
    let out = superlab(&["validate", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    let echo = String::from_utf8(out.stdout).unwrap();
    for key in superlab_cli::config::REGISTRY {
        assert!(echo.contains(key.name), "missing {}", key.name);
    }
    assert!(echo.contains("[default]"));
    assert!(!echo.contains("[user]"));
}

#[test]
fn validate_reports_unknown_key_with_suggestion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "omega_zero = 200\nkappa = -1\n");
    let out = superlab(&["validate", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("omega_zero") && err.contains("omega_0"), "{err}");
}

#[test]
fn validate_cites_kappa_positivity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "neg.cfg", "kappa = -1\n");
    let out = superlab(&["validate", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("kappa must be positive"));
}

#[test]
fn echoed_configuration_reingests() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep.cfg", SWEEP);
    let out = superlab(&["validate", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    let echo = String::from_utf8(out.stdout).unwrap();
    let a = Config::parse(SWEEP).unwrap();
    let b = Config::parse(&echo).unwrap();
    assert_eq!(a.model_params().unwrap(), b.model_params().unwrap());
    let (sa, sb) = (SweepSpec::from_config(&a).unwrap(), SweepSpec::from_config(&b).unwrap());
    assert_eq!((sa.mode, &sa.axis, &sa.models, &sa.base), (sb.mode, &sb.axis, &sb.models, &sb.base));
    for (k, v) in &sa.fixed {
        assert_eq!(sb.fixed.get(k), Some(v), "{k}");
    }
}

#[test]
fn sweeps_are_byte_identical_across_runs_and_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep.cfg", SWEEP);
    let one = dir.path().join("one");
    let many = dir.path().join("many");
    let a = superlab(&["threshold", cfg.to_str().unwrap(), "--jobs", "1", "--out", one.to_str().unwrap()], dir.path());
    let b = superlab(&["threshold", cfg.to_str().unwrap(), "--jobs", "4", "--out", many.to_str().unwrap()], dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(b.status.success());
    for model in ["ideal", "decay", "doppler"] {
        let name = format!("sweep_{model}.csv");
        let x = fs::read(one.join(&name)).unwrap();
        let y = fs::read(many.join(&name)).unwrap();
        assert_eq!(x, y, "{name}");
        assert_eq!(String::from_utf8(x).unwrap().lines().count(), 27);
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(one.join("sweep_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["mode"], "threshold_vs_omega0");
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert!(manifest["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn every_row_recomputes_from_a_single_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep.cfg", SWEEP);
    let out = superlab(&["threshold", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    let spec = SweepSpec::from_config(&Config::parse(SWEEP).unwrap()).unwrap();
    for model in ["ideal", "decay", "doppler"] {
        let csv = fs::read_to_string(dir.path().join(format!("sweep_{model}.csv"))).unwrap();
        let kind = ModelKind::parse(model).unwrap();
        for line in csv.lines().skip(1) {
            let x: f64 = line.split(',').next().unwrap().parse().unwrap();
            let (row, _) = sweep_row(kind, x, &threshold_point(&spec, kind, x));
            assert_eq!(row, line);
        }
        assert!(csv.contains(",false,"), "negative omega_0 has no threshold");
    }
}

#[test]
fn two_point_sweep_with_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "two.cfg",
        "omega = 100\ngamma_d = 59\nsweep_start = 50\nsweep_stop = 300\nsweep_points = 2\n",
    );
    let out = superlab(&["threshold", cfg.to_str().unwrap(), "--plot"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("two_ideal.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let svg = fs::read_to_string(dir.path().join("two.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn coprop_gap_has_no_threshold_near_degenerate_spins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "gap.cfg",
        "mode = coprop_gap\nomega = 320\ngamma_d = 59\ndelta = 0\nsweep_start = -320\nsweep_stop = 320\nsweep_points = 5\n",
    );
    let out = superlab(&["threshold", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("gap_pole_coprop.csv")).unwrap();
    let rows: Vec<Vec<String>> = csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    let centre = &rows[2];
    assert_eq!(centre[0], "0");
    assert_eq!(centre[2], "false", "{csv}");
    assert_eq!(rows[4][2], "true", "{csv}");
    assert_eq!(rows[4][4], "coprop");
}

#[test]
fn zero_coupling_pulse_is_flat_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text = "lambda_r_max = 0\nlambda_s_max = 0\nramp_time = 0.05\nhold_time = 0.05\nn_classes = 3\n\
                seed_floor = false\nsample_dt = 5\ntrap_freq = 50\n";
    let cfg = write_config(dir.path(), "flat.cfg", text);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = superlab(&["pulse", cfg.to_str().unwrap(), "--plot", "--out", d.to_str().unwrap()], dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let x = fs::read(a.join("flat_pulse.csv")).unwrap();
    assert_eq!(x, fs::read(b.join("flat_pulse.csv")).unwrap());
    let text = String::from_utf8(x).unwrap();
    for line in text.lines().skip(1) {
        let intensity: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(intensity <= 1e-8 * 1e5 * (1.0 + 1e-9), "{line}");
    }
    let svg = fs::read_to_string(a.join("flat.svg")).unwrap();
    assert!(svg.contains("stroke-dasharray"), "T/2 markers expected when trap_freq is set");
}

#[test]
fn spectrum_run_writes_every_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "spec.cfg",
        "omega = 100\nomega_0 = 215\ngamma_d = 59\ndelta = 0\nprobe_points = 101\nlambda_frac = 0, 0.5, 0.9\n",
    );
    let out = superlab(&["spectrum", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("spec_spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 101);
    assert!(csv.starts_with("probe_detuning_krad_s,transmission,lambda_frac\n"));
}

#[test]
fn mismatched_mode_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.cfg", "mode = spectrum\n");
    let out = superlab(&["threshold", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
