// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("presets").join(name)
}

fn qbm(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbm"))
        .args(args)
        .env("QBM_OUTPUT_DIR", out)
        .output()
        .unwrap()
}

fn run_preset(command: &str, name: &str) -> (TempDir, String) {
    let dir = TempDir::new().unwrap();
    let out = qbm(dir.path(), &[command, preset(name).to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (dir, String::from_utf8(out.stdout).unwrap())
}

/// Value of a `key=value` stdout line.
fn summary(stdout: &str, key: &str) -> String {
    let prefix = format!("{key}=");
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in {stdout}"))
        .to_string()
}

fn value(stdout: &str, key: &str) -> f64 {
    summary(stdout, key).parse().unwrap()
}

fn table(dir: &TempDir, name: &str) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(dir.path().join(format!("{name}.csv"))).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn every_subcommand_has_help() {
    let dir = TempDir::new().unwrap();
    for cmd in ["evolve", "coeffs", "dsf", "fp", "compare"] {
        let out = qbm(dir.path(), &[cmd, "--help"]);
        assert!(out.status.success());
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn misspelled_key_exits_with_config_error() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "[hilbert]\ndim = 10\n[generator]\nkind = \"caldeira_leggett\"\ngama = 0.1\nbeta = 1\n");
    let out = qbm(dir.path(), &["evolve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gama"));
}

#[test]
fn missing_section_and_bad_grid_are_config_errors() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "[hilbert]\ndim = 10\n");
    let out = qbm(dir.path(), &["evolve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[generator]"));

    let path = write_config(
        &dir,
        "[gas]\nbeta = 1\ngas_mass = 1\n[dsf]\nq_min = 0.0\nq_max = 1\nq_points = 3\ne_min = -1\ne_max = 1\ne_points = 3\n",
    );
    let out = qbm(dir.path(), &["dsf", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q_min"));
}

#[test]
fn divergent_integration_exits_with_numerical_error() {
    let dir = TempDir::new().unwrap();
    let path = write_config(
        &dir,
        "[hilbert]\ndim = 30\n[generator]\nkind = \"caldeira_leggett\"\npotential = \"harmonic\"\nomega_trap = 1\ngamma = 0.5\nbeta = 10\n[integrator]\nmethod = \"rk4\"\nt_final = 1000\ndt = 5\n",
    );
    let out = qbm(dir.path(), &["evolve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn caldeira_leggett_preset_breaches_at_the_pinned_time() {
    let (dir, stdout) = run_preset("evolve", "c2_positivity_caldeira_leggett.toml");
    let t = value(&stdout, "positivity_breach_t");
    assert!((t - 6e-6).abs() < 1e-15, "{t}");
    assert!(value(&stdout, "trace_drift") < 1e-10);
    let (header, rows) = table(&dir, "evolve");
    assert_eq!(header, "t,trace,min_eig,purity,mean_x,mean_p,var_x,var_p");
    assert_eq!(rows.last().unwrap()[0], 20.0);
    assert!(dir.path().join("evolve.meta").exists());
}

#[test]
fn zero_coupling_preset_never_breaches() {
    let (_, stdout) = run_preset("evolve", "zero_coupling.toml");
    assert_eq!(summary(&stdout, "positivity_breach_t"), "none");
}

#[test]
fn bilinear_preset_reproduces_caldeira_leggett_byte_for_byte() {
    let (a, _) = run_preset("evolve", "c7_caldeira_leggett.toml");
    let (b, _) = run_preset("evolve", "c7_bilinear_equivalent.toml");
    let read = |d: &TempDir| std::fs::read(d.path().join("evolve.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn outputs_are_deterministic() {
    let (a, _) = run_preset("evolve", "c8_rk4.toml");
    let (b, _) = run_preset("evolve", "c8_rk4.toml");
    let read = |d: &TempDir| std::fs::read(d.path().join("evolve.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn output_directory_comes_from_config_unless_overridden() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from_config");
    let text = std::fs::read_to_string(preset("c3_constant_tmatrix.toml")).unwrap()
        + &format!("\n[output]\ndir = {:?}\n", target.to_str().unwrap());
    let path = write_config(&dir, &text);
    let out = Command::new(env!("CARGO_BIN_EXE_qbm"))
        .args(["coeffs", path.to_str().unwrap()])
        .env_remove("QBM_OUTPUT_DIR")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("coeffs.csv").exists());

    let override_dir = dir.path().join("from_env");
    let out = qbm(&override_dir, &["coeffs", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(override_dir.join("coeffs.csv").exists());
}

#[test]
fn coefficient_presets() {
    for name in ["c1_cp_saturation.toml", "c3_constant_tmatrix.toml", "c5_bose.toml"] {
        let (_, stdout) = run_preset("coeffs", name);
        assert_eq!(summary(&stdout, "chi"), "0.125000000000000");
    }
    let (dir, _) = run_preset("coeffs", "c3_constant_tmatrix.toml");
    let (header, rows) = table(&dir, "coeffs");
    assert_eq!(header, "D_pp,D_xx,gamma,mu,chi,cp_margin,friction_ratio");
    let (m, t0, beta) = (1.3_f64, 0.8_f64, 0.5_f64);
    let exact = 256.0 * std::f64::consts::PI.powi(3) / 3.0 * m.powi(4) * t0 * t0 / beta.powi(3);
    assert!((rows[0][0] - exact).abs() < 1e-9 * exact);
    assert!((rows[0][4] - 0.125).abs() < 1e-12);

    let (_, stdout) = run_preset("coeffs", "c5_bose.toml");
    assert_eq!(value(&stdout, "friction_ratio"), 0.5);
    let (_, stdout) = run_preset("coeffs", "c5_fermi.toml");
    assert_eq!(value(&stdout, "friction_ratio"), 1.5);
}

#[test]
fn structure_factor_preset() {
    let (dir, stdout) = run_preset("dsf", "c4_structure_factor.toml");
    assert!((value(&stdout, "sum_rule_0") - 1.0).abs() < 1e-8);
    assert!((value(&stdout, "sum_rule_f_ratio") - 1.0).abs() < 1e-8);
    let (header, rows) = table(&dir, "dsf");
    assert_eq!(header, "q,E,S");
    assert_eq!(rows.len(), 400);
}

#[test]
fn fokker_planck_presets() {
    let (dir, stdout) = run_preset("fp", "c8_fp_relaxation.toml");
    assert!((value(&stdout, "stationary_var") - 0.5).abs() < 1e-4);
    assert!(value(&stdout, "mass_drift") < 1e-12);
    let (header, _) = table(&dir, "fp");
    assert_eq!(header, "t,mass,mean_v,var_v");

    let (_, stdout) = run_preset("fp", "c8_fp_maxwell.toml");
    assert!((value(&stdout, "stationary_var") - value(&stdout, "expected_stationary_var")).abs() < 1e-6);

    let (dir, _) = run_preset("fp", "c8_fp_diffusion.toml");
    let (_, rows) = table(&dir, "fp");
    let v0 = rows[0][3];
    for r in &rows {
        assert!((r[3] - (v0 + r[0])).abs() < 5e-3 * r[3]);
    }
}

#[test]
fn comparison_presets() {
    let (dir, stdout) = run_preset("compare", "c6_compare_matched.toml");
    assert!(value(&stdout, "max_rel_diff") < 0.02);
    let (header, rows) = table(&dir, "compare");
    assert_eq!(header, "t,var_p_quantum,var_p_classical,rel_diff");
    assert_eq!(rows.len(), 16);

    let (_, stdout) = run_preset("compare", "c6_compare_mismatched_eta.toml");
    assert!(value(&stdout, "max_rel_diff") > 0.1);

    let (dir, stdout) = run_preset("compare", "c6_compare_zero_fugacity.toml");
    assert!(value(&stdout, "max_rel_diff") < 1e-10);
    let (_, rows) = table(&dir, "compare");
    assert!(rows.iter().all(|r| (r[1] - rows[0][1]).abs() < 1e-10 && (r[2] - rows[0][2]).abs() < 1e-10));
}
