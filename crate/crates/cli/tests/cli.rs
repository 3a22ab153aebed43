//! End-to-end tests of the binary: exit codes, file contracts, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dirac_walk::coins::{Lambda, ModelParams};
use dirac_walk::spectral::{doubling_report, squared_dispersion, ModelTag};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirac-walk"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dirac_walk_cli_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run_ok(output: &Output) {
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn figure1_writes_the_named_files_and_is_deterministic() {
    let dir = temp_dir("figure1");
    let config = write_config(&dir, "run.conf", "experiment = figure1\n");
    let out1 = dir.join("a");
    let out2 = dir.join("b");

    for out in [&out1, &out2] {
        let output = bin()
            .args(["run", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        run_ok(&output);
    }

    for name in [
        "dirac.csv",
        "naive.csv",
        "lgt.csv",
        "dqw.csv",
        "combined.csv",
        "manifest.txt",
        "plot.py",
    ] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn figure1_dqw_column_matches_the_library() {
    let dir = temp_dir("figcheck");
    let config = write_config(&dir, "run.conf", "experiment = figure1\n");
    let out = dir.join("out");
    let output = bin()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    run_ok(&output);

    let params = ModelParams::wilson(0.1, 1.0, 1.0, 0.6, Lambda::Zero);
    let text = std::fs::read_to_string(out.join("dqw.csv")).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(3) {
        let fields: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        let (k, f_file) = (fields[0], fields[1]);
        let f_lib = squared_dispersion(ModelTag::Dqw(Lambda::Zero), &params, k).unwrap();
        assert!(
            (f_file - f_lib).abs() <= 1e-12 * f_lib.max(1.0),
            "F mismatch at k = {k}"
        );
        rows += 1;
    }
    assert_eq!(rows, 1001);

    // Zero structure of the emitted curve agrees with the doubling report.
    let report = doubling_report(ModelTag::Dqw(Lambda::Zero), &params, 1001).unwrap();
    let threshold = 1e-6 * params.bz_edge();
    let curve_zeros = text
        .lines()
        .skip(3)
        .filter(|line| line.split(',').nth(2).unwrap().parse::<f64>().unwrap() < threshold)
        .count();
    assert_eq!(curve_zeros, report.zero_count);
}

#[test]
fn check_passes_on_defaults_and_prints_all_residuals() {
    let dir = temp_dir("check");
    let output = bin()
        .args(["check", "--out"])
        .arg(dir.join("out"))
        .output()
        .unwrap();
    run_ok(&output);
    let stdout = String::from_utf8_lossy(&output.stdout);
    for name in [
        "jump_sum_to_identity",
        "jump_adjacent_overlap",
        "jump_opposite_overlap",
        "transport_VV_eq_BB",
        "transport_BV_exchange",
        "transport_VV_VM_balance",
        "transport_BM_exchange",
        "transport_M_unitary",
        "uu_dagger_side",
    ] {
        let line = stdout
            .lines()
            .find(|l| l.starts_with(name))
            .unwrap_or_else(|| panic!("missing constraint `{name}`"));
        assert!(line.ends_with("true"), "{line}");
        let residual: f64 = line.split(' ').nth(1).unwrap().parse().unwrap();
        assert!(residual <= 1e-12);
    }
    assert!(dir.join("out/report.txt").exists());
}

#[test]
fn check_fails_with_exit_2_when_tolerance_is_unreachable() {
    let dir = temp_dir("checkfail");
    let config = write_config(&dir, "run.conf", "experiment = check\ntolerance = 1e-18\n");
    let output = bin()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn lambda_one_is_rejected_with_a_line_number() {
    let dir = temp_dir("lambda1");
    let config = write_config(&dir, "run.conf", "# comment\nlambda = 1\n");
    let output = bin()
        .args(["check", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 2"), "{stderr}");
    assert!(stderr.contains("B†V = V†B"), "{stderr}");
}

#[test]
fn unknown_key_is_rejected_with_a_line_number() {
    let dir = temp_dir("unknown");
    let config = write_config(&dir, "run.conf", "experiment = check\nbogus = 1\n");
    let output = bin()
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("line 2") && stderr.contains("bogus"),
        "{stderr}"
    );
}

#[test]
fn missing_experiment_is_an_error_for_run() {
    let dir = temp_dir("noexp");
    let config = write_config(&dir, "run.conf", "m = 1\n");
    let output = bin()
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("experiment missing"), "{stderr}");
}

#[test]
fn missing_frequency_exits_with_code_3() {
    let dir = temp_dir("freq");
    let config = write_config(
        &dir,
        "run.conf",
        "experiment = dispersion\nmodel = naive\nepsilon = 1\nm = 2\nrequire_frequencies = true\n",
    );
    let output = bin()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("no real frequency"), "{stderr}");
}

#[test]
fn doubling_sweep_warns_but_succeeds_beyond_rho_one() {
    let dir = temp_dir("doubling");
    let config = write_config(
        &dir,
        "run.conf",
        "experiment = doubling\nrho = 1.2\nepsilons = 0.1, 0.01, 0.001\n",
    );
    let output = bin()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    run_ok(&output);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("doubling criterion violated"), "{stdout}");

    let csv = std::fs::read_to_string(dir.join("out/doubling.csv")).unwrap();
    let amplitudes: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(amplitudes.len(), 3);
    assert!(amplitudes.windows(2).all(|w| w[1] < w[0]), "{amplitudes:?}");
}

#[test]
fn evolve_writes_a_complete_trajectory() {
    let dir = temp_dir("evolve");
    let config = write_config(
        &dir,
        "run.conf",
        "experiment = evolve\nsites = 32\nsteps = 12\ninitial = delta\n",
    );
    let output = bin()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    run_ok(&output);
    let csv = std::fs::read_to_string(dir.join("out/trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 13 * 32);
    assert!(csv.starts_with("step,site,re_c0,re_c1,im_c0,im_c1,prob"));
}

#[test]
fn representation_file_source_works() {
    let dir = temp_dir("repfile");
    // σ₁, σ₃, σ₂ in the plain-text exchange format.
    let rep = "\
0+0i 1+0i\n1+0i 0+0i\n\n1+0i 0+0i\n0+0i -1+0i\n\n0+0i 0-1i\n0+1i 0+0i\n";
    let rep_path = dir.join("pauli.txt");
    std::fs::write(&rep_path, rep).unwrap();
    let config = write_config(
        &dir,
        "run.conf",
        &format!("experiment = check\nrep = file:{}\n", rep_path.display()),
    );
    let output = bin()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    run_ok(&output);
}

#[test]
fn random_rep_seed_changes_with_flag_but_physics_passes() {
    let dir = temp_dir("randomrep");
    let config = write_config(&dir, "run.conf", "experiment = check\nrep = random:7\n");
    for seed in ["3", "9"] {
        let output = bin()
            .args(["run", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(dir.join(format!("out{seed}")))
            .args(["--seed", seed])
            .output()
            .unwrap();
        run_ok(&output);
    }
}

#[test]
fn sweep_reports_orders_for_all_three_models() {
    let dir = temp_dir("sweep");
    let config = write_config(
        &dir,
        "run.conf",
        "experiment = sweep\nepsilons = 0.1, 0.03, 0.01\n",
    );
    let output = bin()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    run_ok(&output);
    let orders = std::fs::read_to_string(dir.join("out/orders.csv")).unwrap();
    assert_eq!(orders.lines().count(), 4);
    for line in orders.lines().skip(1) {
        assert!(line.ends_with("true"), "non-monotone sweep: {line}");
    }
    let rows = std::fs::read_to_string(dir.join("out/convergence.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 3 * 3);
}
