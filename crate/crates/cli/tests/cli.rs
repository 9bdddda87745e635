//! End-to-end checks of the binary: artifact shapes, exit codes, and
//! byte-level determinism across runs and thread counts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn nonrecip(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonrecip"))
        .args(args)
        .current_dir(dir)
        .env_remove("NONRECIP_THREADS")
        .output()
        .expect("binary should launch")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no exit code")
}

#[test]
fn verify_passes_and_writes_report() {
    let dir = TempDir::new().unwrap();
    let out = nonrecip(dir.path(), &["verify"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[PASS] isolation_peak_at_negative_quarter_flux"));
    assert!(!stdout.contains("[FAIL]"));

    let report = fs::read_to_string(dir.path().join("verify.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(parsed["all_pass"], serde_json::Value::Bool(true));
}

#[test]
fn dynamics_row_count_and_flux_flag_equivalence() {
    let dir = TempDir::new().unwrap();
    let out = nonrecip(
        dir.path(),
        &["dynamics", "--phi", "1.5707963267948966", "--t-max", "2", "--steps", "401"],
    );
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("dynamics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 402);
    assert_eq!(csv.lines().next(), Some("axis,t_ab,t_ba,isolation"));

    let out = nonrecip(
        dir.path(),
        &["dynamics", "--phi-over-pi", "0.5", "--t-max", "2", "--steps", "401", "--out", "alt.csv"],
    );
    assert_eq!(code(&out), 0);
    let alt = fs::read(dir.path().join("alt.csv")).unwrap();
    assert_eq!(fs::read(dir.path().join("dynamics.csv")).unwrap(), alt);
}

#[test]
fn artifacts_are_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, threads: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_nonrecip"));
        cmd.args(["sweep-flux", "--phi-count", "181", "--out", name])
            .current_dir(dir.path());
        match threads {
            Some(n) => cmd.env("NONRECIP_THREADS", n),
            None => cmd.env_remove("NONRECIP_THREADS"),
        };
        let out = cmd.output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(dir.path().join(name)).unwrap()
    };
    let auto = run("auto.csv", None);
    let auto_again = run("auto2.csv", None);
    let single = run("single.csv", Some("1"));
    let twin = run("twin.csv", Some("2"));
    assert_eq!(auto, auto_again);
    assert_eq!(auto, single);
    assert_eq!(auto, twin);
}

#[test]
fn unknown_parameter_keys_exit_2() {
    let dir = TempDir::new().unwrap();
    let params = dir.path().join("params.json");
    fs::write(
        &params,
        r#"{"omega_ab":1.0,"omega_cb":10.0,"omega_ca":10.0,
            "phi_ab":0.0,"phi_cb":0.0,"phi_ca":0.0,
            "delta_ab":0.0,"delta_cb":0.0,"delta_ca":0.0,
            "gamma_a":0.1,"gamma_b":0.1,"gamma_c":100.0,
            "surprise":7.0}"#,
    )
    .unwrap();
    let out = nonrecip(dir.path(), &["dynamics", "--params", "params.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("surprise"));
    assert!(!dir.path().join("dynamics.csv").exists(), "no artifact on config error");
}

#[test]
fn out_of_range_values_exit_2() {
    let dir = TempDir::new().unwrap();
    let params = dir.path().join("params.json");
    fs::write(
        &params,
        r#"{"omega_ab":1.0,"omega_cb":10.0,"omega_ca":10.0,
            "phi_ab":0.0,"phi_cb":0.0,"phi_ca":0.0,
            "delta_ab":0.0,"delta_cb":0.0,"delta_ca":0.0,
            "gamma_a":0.1,"gamma_b":0.1,"gamma_c":-1.0}"#,
    )
    .unwrap();
    let out = nonrecip(dir.path(), &["dynamics", "--params", "params.json"]);
    assert_eq!(code(&out), 2);

    let out = nonrecip(dir.path(), &["dynamics", "--steps", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn numeric_domain_failures_exit_3() {
    let dir = TempDir::new().unwrap();
    let params = dir.path().join("params.json");
    fs::write(
        &params,
        r#"{"omega_ab":1.0,"omega_cb":10.0,"omega_ca":10.0,
            "phi_ab":0.0,"phi_cb":0.0,"phi_ca":0.0,
            "delta_ab":0.0,"delta_cb":0.0,"delta_ca":0.0,
            "gamma_a":0.1,"gamma_b":0.1,"gamma_c":0.0}"#,
    )
    .unwrap();
    // eliminating an undamped reservoir is a domain error, not a config one
    let out = nonrecip(
        dir.path(),
        &["dynamics", "--params", "params.json", "--model", "effective"],
    );
    assert_eq!(code(&out), 3);
}

#[test]
fn fwhm_reports_bandwidth_near_081_pi() {
    let dir = TempDir::new().unwrap();
    let out = nonrecip(dir.path(), &["fwhm", "--eta", "0.5"]);
    assert_eq!(code(&out), 0);
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fwhm.json")).unwrap()).unwrap();
    let ratio = parsed["delta_k_over_pi"].as_f64().unwrap();
    assert!((ratio - 0.81).abs() < 0.005, "delta_k/pi = {ratio}");
    assert_eq!(parsed["analytic"], serde_json::Value::Bool(true));
}

#[test]
fn scattering_csv_shape_and_verbose_json() {
    let dir = TempDir::new().unwrap();
    let out = nonrecip(dir.path(), &["scattering", "--k-count", "25"]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("scattering.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("k,i_aa,i_ab,i_ba,i_bb"));
    assert_eq!(csv.lines().count(), 26);

    let out = nonrecip(
        dir.path(),
        &["scattering", "--k-count", "5", "--format", "json", "--verbose", "--out", "v.json"],
    );
    assert_eq!(code(&out), 0);
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    let rows = parsed.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows[0]["detail"]["s_ba"].is_array());
    assert!(rows[0]["i_ba"].is_number());
}

#[test]
fn waveguide_params_file_round_trip() {
    let dir = TempDir::new().unwrap();
    let params = dir.path().join("sys.json");
    fs::write(
        &params,
        r#"{"xi_a":0.5,"xi_b":0.5,"delta_a":0.0,"delta_b":0.0,
            "g_a":0.7071067811865476,"g_b":0.7071067811865476,
            "atom":{"delta_a":0.0,"delta_b":0.0,
                    "gamma_eff_a":1.0,"gamma_eff_b":1.0,
                    "j_ab":[0.0,0.0],"j_ba":[0.0,-2.0]}}"#,
    )
    .unwrap();
    let out = nonrecip(
        dir.path(),
        &["scattering", "--params", "sys.json", "--k-count", "9", "--out", "flows.csv"],
    );
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("flows.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);

    // the row at k = pi/2 transmits with unit flow
    let mid = csv.lines().nth(5).unwrap();
    let fields: Vec<&str> = mid.split(',').collect();
    let i_ba: f64 = fields[3].parse().unwrap();
    assert!((i_ba - 1.0).abs() < 1e-9, "i_ba = {i_ba}");
}

#[test]
fn bad_thread_env_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nonrecip"))
        .args(["fwhm"])
        .current_dir(dir.path())
        .env("NONRECIP_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
