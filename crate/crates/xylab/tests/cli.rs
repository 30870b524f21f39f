//! CLI-level integration: config validation and exit classification,
//! manifest completeness, the verification suite, and the comparative
//! behavior the commands are expected to expose.

use std::fs;

use xylab::cli;
use xylab::config::{
    DisorderTriple, GridSpec, ProfileSpec, TransportConfig,
};
use xylab::error::XyError;
use xylab::model::Distribution;

fn uniform_field() -> DisorderTriple {
    DisorderTriple {
        mu: Distribution::Constant { value: 1.0 },
        gamma: Distribution::Constant { value: 0.0 },
        nu: Distribution::Uniform { low: 0.0, high: 4.0 },
    }
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{ \"experiment\": \"transport\", \"n\": ").unwrap();
    let err = cli::cmd_transport(&path, dir.path(), None).unwrap_err();
    assert_eq!(cli::exit_code(&err), 1, "parse error must exit 1: {err}");
    // the diagnostic carries a line/column position
    assert!(format!("{err}").contains("line"), "no position in: {err}");

    fs::write(
        &path,
        r#"{
            "experiment": "transport",
            "n": 10, "realizations": 1, "seed": 0,
            "disorder": {
                "mu": {"kind": "constant", "value": 1.0},
                "gamma": {"kind": "constant", "value": 0.0},
                "nu": {"kind": "uniform", "low": 0.0, "high": 4.0}
            },
            "profile": {"kind": "uniform", "value": 0.5},
            "targets": [[5]],
            "not_a_field": true
        }"#,
    )
    .unwrap();
    let err = cli::cmd_transport(&path, dir.path(), None).unwrap_err();
    assert_eq!(cli::exit_code(&err), 1);
    assert!(matches!(err, XyError::Config(_)));
}

#[test]
fn wrong_experiment_kind_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(
        &path,
        r#"{
            "experiment": "eigencorrelator",
            "n": 10, "realizations": 1, "seed": 0,
            "disorder": {
                "mu": {"kind": "constant", "value": 1.0},
                "gamma": {"kind": "constant", "value": 0.0},
                "nu": {"kind": "uniform", "low": 0.0, "high": 4.0}
            }
        }"#,
    )
    .unwrap();
    let err = cli::cmd_transport(&path, dir.path(), None).unwrap_err();
    assert_eq!(cli::exit_code(&err), 1);
}

#[test]
fn manifest_lists_existing_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = xylab::config::ExperimentConfig::Transport(TransportConfig {
        n: 12,
        realizations: 3,
        seed: 0,
        disorder: uniform_field(),
        grid: GridSpec {
            t_min: 0.1,
            t_max: 10.0,
            points: 6,
        },
        profile: ProfileSpec::DomainWall { a: 4, b: 6 },
        targets: vec![vec![9, 10]],
        fit_window: None,
    });
    let path = dir.path().join("cfg.json");
    fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = dir.path().join("out");
    assert_eq!(cli::cmd_transport(&path, &out, None).unwrap(), 0);

    let manifest: xylab::config::RunManifest =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.command, "transport");
    assert!(manifest.outputs.len() >= 4);
    for name in &manifest.outputs {
        assert!(out.join(name).exists(), "listed output {name} missing");
    }
    // seed override is echoed through the manifest
    let out2 = dir.path().join("out2");
    assert_eq!(cli::cmd_transport(&path, &out2, Some(42)).unwrap(), 0);
    let manifest2: xylab::config::RunManifest =
        serde_json::from_str(&fs::read_to_string(out2.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest2.master_seed, 42);
}

#[test]
fn verify_suite_green_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let code = cli::cmd_verify(dir.path(), 20240581).unwrap();
    assert_eq!(code, 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("verify_report.json")).unwrap())
            .unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() >= 12, "only {} checks", checks.len());
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
}

#[test]
fn frozen_chain_correlator_has_no_fit() {
    // mu = 0 decouples every site: Q(r >= 1) = 0 and no decay fit exists
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(
        &path,
        r#"{
            "experiment": "eigencorrelator",
            "n": 16, "realizations": 4, "seed": 0,
            "disorder": {
                "mu": {"kind": "constant", "value": 0.0},
                "gamma": {"kind": "constant", "value": 0.0},
                "nu": {"kind": "uniform", "low": 0.5, "high": 4.0}
            }
        }"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    assert_eq!(cli::cmd_eigencorrelator(&path, &out, None).unwrap(), 0);
    let text = fs::read_to_string(out.join("correlator.csv")).unwrap();
    for (i, line) in text.lines().enumerate().skip(2) {
        let q: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(q.abs() < 1e-14, "row {i}: Q = {q}");
    }
    let fits: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("fits.json")).unwrap()).unwrap();
    assert!(fits["exponential"].is_null());
    assert!(fits["preferred"].is_null());
}

#[test]
fn clean_chain_correlator_reports_without_verdict() {
    // translation-invariant A is delocalized; the command still exits 0
    // and reports the fit residuals
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(
        &path,
        r#"{
            "experiment": "eigencorrelator",
            "n": 40, "realizations": 2, "seed": 0,
            "disorder": {
                "mu": {"kind": "constant", "value": 1.0},
                "gamma": {"kind": "constant", "value": 0.0},
                "nu": {"kind": "constant", "value": 1.0}
            }
        }"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    assert_eq!(cli::cmd_eigencorrelator(&path, &out, None).unwrap(), 0);
    let fits: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("fits.json")).unwrap()).unwrap();
    assert!(fits["exponential"]["residual"].as_f64().is_some());
}

#[test]
fn disordered_edge_penetration_smaller_than_clean() {
    // domain-wall melting: by t = 50 the disordered profile has moved at
    // far fewer sites than the clean (nu = 0) control
    let dir = tempfile::tempdir().unwrap();
    let mk = |nu: Distribution| {
        xylab::config::ExperimentConfig::Transport(TransportConfig {
            n: 50,
            realizations: 10,
            seed: 4,
            disorder: DisorderTriple {
                mu: Distribution::Constant { value: 1.0 },
                gamma: Distribution::Constant { value: 0.0 },
                nu,
            },
            grid: GridSpec {
                t_min: 50.0,
                t_max: 50.0,
                points: 2,
            },
            profile: ProfileSpec::DomainWall { a: 21, b: 30 },
            targets: vec![vec![40]],
            fit_window: None,
        })
    };
    let penetration = |name: &str, cfg: &xylab::config::ExperimentConfig| -> usize {
        let path = dir.path().join(format!("{name}.json"));
        fs::write(&path, serde_json::to_string(cfg).unwrap()).unwrap();
        let out = dir.path().join(name);
        let code = cli::cmd_transport(&path, &out, None).unwrap();
        assert!(code == 0 || code == 3, "unexpected exit {code}");
        // count sites whose mean density at t = 50 moved by more than 0.05
        let text = fs::read_to_string(out.join("density_profile.csv")).unwrap();
        let mut moved = 0;
        for line in text.lines().skip(1) {
            let mut parts = line.split(',');
            let t: f64 = parts.next().unwrap().parse().unwrap();
            let site: usize = parts.next().unwrap().parse().unwrap();
            let rho: f64 = parts.next().unwrap().parse().unwrap();
            if (t - 50.0).abs() < 1e-9 {
                let initial = if (21..=30).contains(&site) { 1.0 } else { 0.0 };
                if (rho - initial).abs() > 0.05 {
                    moved += 1;
                }
            }
        }
        moved
    };
    let disordered = penetration(
        "disordered",
        &mk(Distribution::Uniform { low: 0.0, high: 4.0 }),
    );
    let clean = penetration("clean", &mk(Distribution::Constant { value: 0.0 }));
    assert!(
        disordered < clean,
        "penetration: disordered {disordered} sites vs clean {clean} sites"
    );
}
