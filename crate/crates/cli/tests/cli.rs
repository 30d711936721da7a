use std::path::Path;
use std::process::{Command, Output};

use piv_cli::output::fmt;
use proptest::prelude::*;
use serde_json::Value;
use tempfile::TempDir;

fn piv(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_piv")).current_dir(dir).args(args).output().expect("piv runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

#[test]
fn generate_prints_parameters_and_writes_csv() {
    let dir = TempDir::new().unwrap();
    let out = piv(dir.path(), &["generate", "--k", "2", "--eps1", "5", "--lambda", "1", "--kappa", "5", "--family", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "a=-2.5 b=-60.5"), "{text}");
    assert!(text.contains("family=1 poles=0"));

    let csv = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,re_g,im_g"));
    assert_eq!(lines.count(), 2001);
    assert_eq!(std::fs::read_to_string(dir.path().join("g.csv.mask")).unwrap(), "");
}

#[test]
fn permuted_family_parameters() {
    let dir = TempDir::new().unwrap();
    let base = ["generate", "--k", "1", "--eps1", "5", "--lambda", "1", "--kappa", "1"];
    let two = piv(dir.path(), &[&base[..], &["--family", "2"]].concat());
    assert!(stdout(&two).lines().any(|l| l == "a=9 b=-2"), "{}", stdout(&two));
    let three = piv(dir.path(), &[&base[..], &["--family", "3"]].concat());
    assert!(stdout(&three).lines().any(|l| l == "a=-7.5 b=-40.5"), "{}", stdout(&three));
}

#[test]
fn json_output() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("g.json");
    let out = piv(dir.path(), &["generate", "--k", "1", "--eps1", "0.25", "--lambda", "0", "--kappa", "0", "--format", "json", "--out-path", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["params"]["a"], 0.25);
    assert_eq!(v["params"]["b"], -1.125);
    assert_eq!(v["x"].as_array().unwrap().len(), 2001);
    assert!(v["im_g"].as_array().unwrap().iter().all(|x| x.as_f64() == Some(0.0)));
}

#[test]
fn anti_gaussian_seed_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let out = piv(dir.path(), &["generate", "--k", "1", "--eps1", "-0.5", "--lambda", "0", "--kappa", "0", "--family", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("degenerate: g identically zero"));
}

#[test]
fn bad_arguments_exit_with_one() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["generate", "--family", "4"][..],
        &["generate", "--n", "50"],
        &["generate", "--xmin", "3", "--xmax", "1"],
        &["generate", "--k", "0"],
        &["frobnicate"],
        &["generate", "--eps1", "0.7", "--lambda", "0", "--kappa", "0"],
    ] {
        let out = piv(dir.path(), args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
    }
    assert_eq!(piv(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn risky_seed_runs_with_override() {
    let dir = TempDir::new().unwrap();
    let out = piv(dir.path(), &["generate", "--k", "1", "--eps1", "0.7", "--lambda", "0", "--kappa", "0", "--allow-risky"]);
    assert_ne!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn verify_fixture() {
    let dir = TempDir::new().unwrap();
    let out = piv(dir.path(), &["verify", "--fixture", "linear"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let v = json(&out);
    assert_eq!(v["all_pass"], true);
    assert!(v["checks"][0]["value"].as_f64().unwrap() <= 1e-8);

    let wrong = piv(dir.path(), &["verify", "--fixture", "two-thirds", "--a", "1"]);
    assert_eq!(wrong.status.code(), Some(4));
    assert_eq!(json(&wrong)["all_pass"], false);
}

#[test]
fn verify_model_reports_every_check() {
    let dir = TempDir::new().unwrap();
    let out = piv(dir.path(), &["verify", "--k", "1", "--eps1", "5", "--lambda", "1", "--kappa", "1", "--n", "16001"]);
    let v = json(&out);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        [
            "seed_residual",
            "riccati_residual",
            "wronskian_fd",
            "piv_residual",
            "hamiltonian_residual_E1",
            "hamiltonian_residual_E2",
            "hamiltonian_residual_E3"
        ]
    );
    assert_eq!(out.status.code(), Some(0), "{v}");
}

#[test]
fn spectrum_reports() {
    let dir = TempDir::new().unwrap();
    let out = piv(dir.path(), &["spectrum", "--k", "2", "--eps1", "5", "--lambda", "1", "--kappa", "5", "--N", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    for key in ["finite_ladder", "infinite_ladder", "annihilated_down", "annihilated_up", "one_way_links", "verified", "q_roots"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["finite_ladder"], serde_json::json!([4.0, 5.0]));

    let out = piv(dir.path(), &["spectrum", "--k", "1", "--eps1", "0.25", "--lambda", "0", "--kappa", "0"]);
    assert_eq!(json(&out)["finite_ladder"], serde_json::json!([0.25]));

    let out = piv(dir.path(), &["spectrum", "--k", "1", "--eps1", "2.5", "--lambda", "1", "--kappa", "1"]);
    let links = json(&out)["one_way_links"].as_array().unwrap().clone();
    assert_eq!(links.len(), 2);
    assert!(links.iter().any(|l| l["from"] == 3.5 && l["to"] == 2.5 && l["direction"] == "down"));

    let out = piv(dir.path(), &["spectrum", "--N", "21"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn extremal_writes_three_states() {
    let dir = TempDir::new().unwrap();
    let out = piv(dir.path(), &["extremal", "--k", "2", "--eps1", "5", "--lambda", "1", "--kappa", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("E1=4 "), "{text}");
    assert!(text.contains("E2=0.5 "));
    assert!(text.contains("E3=6 "));
    let csv = std::fs::read_to_string(dir.path().join("extremal.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x,re_psi_E1,im_psi_E1,re_psi_E2,im_psi_E2,re_psi_E3,im_psi_E3"));
}

proptest! {
    #[test]
    fn csv_numbers_round_trip(v in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let back: f64 = fmt(v).parse().unwrap();
        prop_assert_eq!(back.to_bits(), v.to_bits());
    }
}
