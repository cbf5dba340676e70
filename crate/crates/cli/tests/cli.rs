//! End-to-end runs of the `lenscalc` binary.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn lenscalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lenscalc")).args(args).env_remove("LENSCALC_BUDGET_BITS").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn check_cert_bytes(bytes: &[u8]) -> i32 {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(bytes).unwrap();
    code(&lenscalc(&["check-cert", file.path().to_str().unwrap()]))
}

#[test]
fn prop_ideal_example_is_verified() {
    let out = lenscalc(&[
        "verify",
        "prop-ideal",
        "-p",
        "2",
        "-k",
        "2",
        "-l",
        "1",
        "-m",
        "1",
        "-n",
        "3",
        "--backend",
        "exact",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let c = json(&out);
    assert_eq!(c["verdict"], "verified");
    assert_eq!(c["witness"]["element"], serde_json::json!(["0", "2", "1"]));
    assert_eq!(check_cert_bytes(&out.stdout), 0);
}

#[test]
fn corollary_example_exits_one() {
    let out = lenscalc(&["els", "corollary", "-p", "3", "--horizon", "4", "--json"]);
    assert_eq!(code(&out), 1);
    let c = json(&out);
    assert_eq!(c["witness"]["violations"], serde_json::json!([0]));
    for stage in c["witness"]["stages"].as_array().unwrap().iter().skip(1) {
        assert_eq!(stage["value_eq_n_i"], true);
    }
    assert_eq!(check_cert_bytes(&out.stdout), 0);
}

#[test]
fn genus_refute_example_is_unknown() {
    let out = lenscalc(&["genus", "refute", "-p", "3", "-k", "1", "-m", "5", "-n", "3"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("unknown"));
    let out = lenscalc(&["genus", "refute", "-p", "3", "-k", "1", "-m", "11", "-n", "3"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_errors_exit_three() {
    for args in [
        vec!["ring", "info", "-p", "4", "-k", "1", "-n", "3"],
        vec!["ring", "info", "-p", "3", "-k", "1"],
        vec!["ring", "info", "-p", "3", "-k", "1", "-n", "x"],
        vec!["ring", "info", "-p", "3", "-k", "99999999999999999999999", "-n", "3"],
        vec!["verify", "prop-ideal", "-p", "3", "-k", "1", "-l", "1", "-m", "1", "-n", "3"],
        vec!["els", "check", "--family", "f9", "-p", "3", "--horizon", "3"],
        vec!["els", "certify", "--family", "f1", "-p", "3", "-i", "1", "-m", "3"],
        vec!["check-cert", "/nonexistent/cert.json"],
        vec!["frobnicate"],
    ] {
        let out = lenscalc(&args);
        assert_eq!(code(&out), 3, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?} wrote to stdout");
        assert!(!out.stderr.is_empty(), "{args:?} gave no diagnostic");
    }
    assert_eq!(code(&lenscalc(&["--help"])), 0);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["ring", "factors", "-p", "3", "-k", "2", "-n", "6", "--json"],
        vec!["els", "certify", "--family", "f1", "-p", "3", "-i", "2", "-j", "2", "--json"],
        vec!["els", "check", "--family", "f3", "-p", "5", "--horizon", "6"],
    ] {
        let (a, b) = (lenscalc(&args), lenscalc(&args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(code(&a), 0);
    }
}

#[test]
fn ring_subcommands_round_trip() {
    for args in [
        vec!["ring", "info", "-p", "5", "-k", "2", "-n", "7", "--json"],
        vec!["ring", "factors", "-p", "2", "-k", "3", "-n", "8", "--json"],
        vec![
            "ring",
            "pow",
            "-p",
            "3",
            "-k",
            "2",
            "-n",
            "5",
            "--element",
            "1,2,-3",
            "-e",
            "1000000000000000000000",
            "--json",
        ],
        vec!["ring", "member", "-p", "3", "-k", "1", "-n", "4", "--generator", "sigma", "--json"],
        vec!["ring", "member", "-p", "3", "-k", "1", "-n", "4", "--element", "0,3,3,1", "--json"],
        vec!["ring", "member", "-p", "3", "-k", "2", "-n", "4", "--element", "0,0,1", "--backend", "modular", "--json"],
    ] {
        let out = lenscalc(&args);
        assert!(code(&out) <= 2, "{args:?}");
        assert_eq!(check_cert_bytes(&out.stdout), 0, "{args:?}");
    }
    let factors = json(&lenscalc(&["ring", "factors", "-p", "2", "-k", "2", "-n", "3", "--json"]));
    assert_eq!(factors["witness"]["factors"], serde_json::json!(["2", "8"]));
    // (y+1)^3 - 1 = 3y + 3y^2 + y^3 lies in the ideal for p^k = 3.
    let member = lenscalc(&["ring", "member", "-p", "3", "-k", "1", "-n", "4", "--element", "0,3,3,1"]);
    assert_eq!(code(&member), 0);
}

#[test]
fn budget_forces_modular_fallback() {
    let out = Command::new(env!("CARGO_BIN_EXE_lenscalc"))
        .args([
            "verify",
            "prop-ideal",
            "-p",
            "3",
            "-k",
            "3",
            "-l",
            "2",
            "-m",
            "2",
            "-n",
            "10",
            "--backend",
            "exact",
            "--json",
        ])
        .env("LENSCALC_BUDGET_BITS", "8")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let c = json(&out);
    assert_eq!(c["backend"], "modular");
    let notes = c["witness"]["notes"].to_string();
    assert!(notes.contains("budget"), "{notes}");
    assert_eq!(check_cert_bytes(&out.stdout), 0);
    let ring = lenscalc(&["--budget-bits", "8", "ring", "info", "-p", "3", "-k", "3", "-n", "10"]);
    assert_eq!(code(&ring), 3);
}

#[test]
fn family_file_is_accepted() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# stages of a custom family\np = 3\n0 1 4\n1 2 5\n\n2 3 9").unwrap();
    let path = file.path().to_str().unwrap();
    let out = lenscalc(&["els", "check", "--family-file", path, "--horizon", "2", "--json"]);
    assert_eq!(code(&out), 1, "n_2 = 9 is not above 3^(3-1)");
    assert_eq!(json(&out)["witness"]["first_violation"]["i"], 2);
    assert_eq!(check_cert_bytes(&out.stdout), 0);
    let out = lenscalc(&["els", "check", "--family-file", path, "-p", "5", "--horizon", "2"]);
    assert_eq!(code(&out), 3);
    let out = lenscalc(&["genus", "remark", "--family-file", path, "-i", "2", "-j", "1", "--json"]);
    assert_eq!(check_cert_bytes(&out.stdout), 0);
}

#[test]
fn tampered_certificate_is_rejected() {
    let out = lenscalc(&["ring", "info", "-p", "3", "-k", "2", "-n", "4", "--json"]);
    let mut c = json(&out);
    c["witness"]["det"] = Value::String("81".into());
    assert_eq!(check_cert_bytes(c.to_string().as_bytes()), 1);
    assert_eq!(check_cert_bytes(b"{\"verdict\": \"verified\"}"), 3);
}
