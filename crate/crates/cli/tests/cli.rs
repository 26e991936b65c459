//! End-to-end tests of the `qfi` binary: verb dispatch, file validation,
//! error codes, output determinism and dump round-trips.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qfi_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qfi"))
}

fn run(args: &[&str]) -> Output {
    qfi_bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn mixed_state() -> &'static str {
    r#"{"dim": 2, "data": [[[0.5,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]]}"#
}

fn diag_derivative() -> &'static str {
    r#"{"dim": 2, "data": [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[-1.0,0.0]]]}"#
}

#[test]
fn qfi_of_diagonal_family() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let ds = dir.path().join("ds.json");
    write(&s, mixed_state());
    write(&ds, diag_derivative());
    let out = run(&[
        "qfi",
        "--state",
        s.to_str().unwrap(),
        "--dstate",
        ds.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["qfi"], 4.0);
}

#[test]
fn unknown_verb_is_a_usage_error() {
    let out = run(&["no-such-verb"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let out = run(&["qfi"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn trace_violation_has_stable_code() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let ds = dir.path().join("ds.json");
    write(
        &s,
        r#"{"dim": 2, "data": [[[0.45,0.0],[0.0,0.0]],[[0.0,0.0],[0.45,0.0]]]}"#,
    );
    write(&ds, diag_derivative());
    let out = run(&[
        "qfi",
        "--state",
        s.to_str().unwrap(),
        "--dstate",
        ds.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "trace-violation");
}

#[test]
fn non_square_data_has_stable_code() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let ds = dir.path().join("ds.json");
    write(
        &s,
        r#"{"dim": 2, "data": [[[0.5,0.0],[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0],[0.0,0.0]]]}"#,
    );
    write(&ds, diag_derivative());
    let out = run(&[
        "qfi",
        "--state",
        s.to_str().unwrap(),
        "--dstate",
        ds.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "non-square");
}

#[test]
fn malformed_json_has_stable_code() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    write(&s, "{not json");
    let ds = dir.path().join("ds.json");
    write(&ds, diag_derivative());
    let out = run(&[
        "qfi",
        "--state",
        s.to_str().unwrap(),
        "--dstate",
        ds.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "malformed-json");
}

#[test]
fn singular_distribution_has_stable_code() {
    // CFI of a measurement with a vanishing outcome whose probability still
    // moves with x.
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let ds = dir.path().join("ds.json");
    let up = dir.path().join("up.json");
    let down = dir.path().join("down.json");
    write(
        &s,
        r#"{"dim": 2, "data": [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]]}"#,
    );
    write(&ds, diag_derivative());
    write(
        &up,
        r#"{"dim": 2, "data": [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]]}"#,
    );
    write(
        &down,
        r#"{"dim": 2, "data": [[[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]}"#,
    );
    let out = run(&[
        "cfi",
        "--state",
        s.to_str().unwrap(),
        "--dstate",
        ds.to_str().unwrap(),
        "--povm",
        up.to_str().unwrap(),
        "--povm",
        down.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "singular-distribution");
}

#[test]
fn sld_dump_reloads_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let ds = dir.path().join("ds.json");
    let dump = dir.path().join("sld.json");
    write(
        &s,
        r#"{"dim": 2, "data": [[[0.62,0.0],[0.1,0.07]],[[0.1,-0.07],[0.38,0.0]]]}"#,
    );
    write(
        &ds,
        r#"{"dim": 2, "data": [[[0.21,0.0],[0.0,0.13]],[[0.0,-0.13],[-0.21,0.0]]]}"#,
    );
    let out = run(&[
        "sld",
        "--state",
        s.to_str().unwrap(),
        "--dstate",
        ds.to_str().unwrap(),
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let dumped = std::fs::read_to_string(&dump).unwrap();
    let reloaded = qfi_core::io::matrix_from_json(&dumped).unwrap();
    let rewritten = qfi_core::io::matrix_to_json(&reloaded);
    assert_eq!(dumped, rewritten, "dump must reload bit-identically");
    // and the printed result equals the dumped file
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), dumped);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "sweep1", "--q", "0.995", "--tau", "1", "--x", "1", "--n-min", "1", "--n-max", "40",
        "--format", "csv",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,f_conv,f_classical,f_quantum,f_exact,err_bound,err_exact,asymp_small_n,asymp_large_n"
    );
    assert_eq!(lines.count(), 40);
}

#[test]
fn example1_reports_the_threshold() {
    let out = run(&[
        "example1", "--q", "0.995", "--tau", "1", "--x", "1", "--n", "50",
    ]);
    let v = stdout_json(&out);
    let threshold = v["threshold"].as_f64().unwrap();
    assert!((threshold - 49.25).abs() < 0.01);
    assert!(v["f_conv"].as_f64().unwrap() > 0.0);
}

#[test]
fn example2_emits_both_closed_forms() {
    let out = run(&["example2", "--n", "1", "--tau", "1", "--x", "0.5"]);
    let v = stdout_json(&out);
    assert!((v["bound"].as_f64().unwrap() - 0.581977).abs() < 1e-5);
    assert!((v["exact"].as_f64().unwrap() - 0.367879).abs() < 1e-5);
}

#[test]
fn example2_rejects_zero_rate_with_stable_code() {
    let out = run(&["example2", "--n", "1", "--tau", "1", "--x", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "divergent-bound");
}

#[test]
fn ext_bound_orders_the_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let ds = dir.path().join("ds.json");
    write(
        &s,
        r#"{"dim": 2, "data": [[[0.7,0.0],[0.1,0.05]],[[0.1,-0.05],[0.3,0.0]]]}"#,
    );
    write(
        &ds,
        r#"{"dim": 2, "data": [[[0.0,0.0],[0.2,0.1]],[[0.2,-0.1],[0.0,0.0]]]}"#,
    );
    let out = run(&[
        "ext-bound",
        "--state",
        s.to_str().unwrap(),
        "--dstate",
        ds.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    let qfi = v["qfi"].as_f64().unwrap();
    let uhlmann = v["uhlmann"].as_f64().unwrap();
    let invquad = v["inverse_quadratic"].as_f64().unwrap();
    assert!(qfi <= uhlmann + 1e-9);
    assert!(qfi <= invquad + 1e-9);
}

#[test]
fn channel_bound_of_a_unitary_family() {
    // A = exp(-i x sz/2) at x = 0: dA = -i sz/2; on |+><+| the bound is 1.
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let da = dir.path().join("da.json");
    let s = dir.path().join("s.json");
    write(
        &a,
        r#"{"dim": 2, "data": [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]}"#,
    );
    write(
        &da,
        r#"{"dim": 2, "data": [[[0.0,-0.5],[0.0,0.0]],[[0.0,0.0],[0.0,0.5]]]}"#,
    );
    write(
        &s,
        r#"{"dim": 2, "data": [[[0.5,0.0],[0.5,0.0]],[[0.5,0.0],[0.5,0.0]]]}"#,
    );
    let out = run(&[
        "channel-bound",
        "--kraus",
        a.to_str().unwrap(),
        "--dkraus",
        da.to_str().unwrap(),
        "--state",
        s.to_str().unwrap(),
        "--eta",
        "0.0",
    ]);
    let v = stdout_json(&out);
    assert!((v["bound"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((v["h1"].as_f64().unwrap() - 0.25).abs() < 1e-10);
    assert!((v["value_at_eta"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn lindblad_bound_for_dephasing_rate() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let s = dir.path().join("s.json");
    let r = std::f64::consts::FRAC_1_SQRT_2;
    write(
        &model,
        &format!(
            r#"{{"hamiltonian": {{"dim": 2, "data": [[[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]]}},
               "x0": 0.0,
               "jumps": [{{"gamma": {{"dim": 2, "data": [[[{r},0.0],[0.0,0.0]],[[0.0,0.0],[-{r},0.0]]]}}, "rate": 0.5}}],
               "tau": 1.0}}"#
        ),
    );
    write(
        &s,
        r#"{"dim": 2, "data": [[[0.5,0.0],[0.5,0.0]],[[0.5,0.0],[0.5,0.0]]]}"#,
    );
    let out = run(&[
        "lindblad-bound",
        "--model",
        model.to_str().unwrap(),
        "--state",
        s.to_str().unwrap(),
        "--param",
        "x1",
    ]);
    let v = stdout_json(&out);
    assert!((v["ext_qfi"].as_f64().unwrap() - 0.5819767068693265).abs() < 1e-9);
}

#[test]
fn conv_bound_splits_classical_and_quantum() {
    // Frozen states |+>, |-> with Bernoulli weights moving at rate matching
    // unit classical information.
    let dir = tempfile::tempdir().unwrap();
    let plus = dir.path().join("plus.json");
    let minus = dir.path().join("minus.json");
    let zero = dir.path().join("zero.json");
    write(
        &plus,
        r#"{"dim": 2, "data": [[[0.5,0.0],[0.5,0.0]],[[0.5,0.0],[0.5,0.0]]]}"#,
    );
    write(
        &minus,
        r#"{"dim": 2, "data": [[[0.5,0.0],[-0.5,0.0]],[[-0.5,0.0],[0.5,0.0]]]}"#,
    );
    write(
        &zero,
        r#"{"dim": 2, "data": [[[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]]}"#,
    );
    // p = (cos^2(t), sin^2(t)) with dp = (-sin 2t, sin 2t): CFI = 4
    let t = 0.53f64;
    let dp = -(2.0 * t).sin();
    let c2 = t.cos().powi(2);
    let out = run(&[
        "conv-bound",
        "--weights",
        &format!("{},{}", c2, 1.0 - c2),
        "--dweights",
        &format!("{},{}", dp, -dp),
        "--state",
        plus.to_str().unwrap(),
        "--state",
        minus.to_str().unwrap(),
        "--dstate",
        zero.to_str().unwrap(),
        "--dstate",
        zero.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert!((v["quantum"].as_f64().unwrap()).abs() < 1e-12);
    let classical = v["classical"].as_f64().unwrap();
    assert!((classical - 4.0).abs() < 1e-6, "classical = {classical}");
    assert!(
        (v["f_conv"].as_f64().unwrap() - classical).abs() < 1e-15,
        "parts must sum exactly"
    );
}

#[test]
fn precision_env_var_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let ds = dir.path().join("ds.json");
    write(&s, mixed_state());
    write(&ds, diag_derivative());
    let out = qfi_bin()
        .args([
            "qfi",
            "--state",
            s.to_str().unwrap(),
            "--dstate",
            ds.to_str().unwrap(),
        ])
        .env("QFI_PRECISION", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "bad-argument");

    let out = qfi_bin()
        .args([
            "qfi",
            "--state",
            s.to_str().unwrap(),
            "--dstate",
            ds.to_str().unwrap(),
        ])
        .env("QFI_PRECISION", "1e-10")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["qfi"], 4.0);
}
