//! The verification harness: mutation sensitivity, report schema and the
//! constant estimators.

use std::path::Path;

use serde_json::Value;
use thirdgrade::control::{ControlProblem, CostConfig, OptimizerOptions};
use thirdgrade::sampling::{random_field, random_smooth_trajectory, rng};
use thirdgrade::verify::{
    estimate_kappa, initial_data_sensitivity, kappa_ratio, run_suite, run_suite_with,
    stability_check, uniqueness_diagnostics, Level, SearchBudget, SuiteSetup, CHECK_NAMES,
};
use thirdgrade::{Error, Field, Model, ModelParams, SpectralBasis, Trajectory, TrajectoryKind};

fn model() -> Model {
    let params = ModelParams::new(0.5, 0.1, 0.05, 0.2).unwrap();
    Model::new(SpectralBasis::new(3, 0.1).unwrap(), params).unwrap()
}

#[test]
fn corrupted_cubic_sign_fails_energy_check() {
    let mut setup = SuiteSetup::for_level(Level::Fast);
    setup.solver.corrupt_cubic_sign = true;
    let report = run_suite_with(&setup, 1);
    let energy = report.check("energy_inequality").unwrap();
    assert!(!energy.passed, "{}", energy.summary_line());
    assert!(!report.passed);
    assert_eq!(report.checks.len(), CHECK_NAMES.len());
}

/// Key structure of a report, with values replaced by their JSON type.
fn shape(v: &Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(m.iter().map(|(k, v)| (k.clone(), shape(v))).collect()),
        Value::Array(a) => Value::Array(a.first().map(shape).into_iter().collect()),
        Value::Null => Value::String("null".into()),
        Value::Bool(_) => Value::String("bool".into()),
        Value::Number(_) => Value::String("number".into()),
        Value::String(_) => Value::String("string".into()),
    }
}

#[test]
fn report_schema_matches_golden() {
    let report = run_suite(Level::Fast, 0);
    let value: Value = serde_json::from_str(&report.to_json()).unwrap();
    let mut schema = serde_json::Map::new();
    for (k, v) in value.as_object().unwrap() {
        if k != "checks" {
            schema.insert(k.clone(), shape(v));
        }
    }
    let checks: Vec<Value> = value["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let mut s = shape(c);
            s["name"] = c["name"].clone();
            // Both null and a value are legal for these two.
            s["measured"] = Value::String("number|null".into());
            s["error"] = Value::String("string|null".into());
            s
        })
        .collect();
    schema.insert("checks".into(), Value::Array(checks));
    let got = serde_json::to_string_pretty(&Value::Object(schema)).unwrap() + "\n";
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/verify_report_schema.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).expect("golden file present");
    assert_eq!(got, want, "report schema changed; rerun with UPDATE_GOLDEN=1 if intended");
}

#[test]
fn report_lists_every_check_with_tolerance() {
    let report = run_suite(Level::Fast, 2);
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, CHECK_NAMES);
    for c in &report.checks {
        assert!(c.measured.is_some(), "{} has no measurement", c.name);
        assert!(c.tolerance.is_finite());
        assert!(c.error.is_none());
    }
    assert!(report.passed);
}

#[test]
fn kappa_estimate_bounds_every_sample() {
    let b = SpectralBasis::new(3, 0.2).unwrap();
    let est = estimate_kappa(&b, SearchBudget::default(), 4);
    assert!(est.value >= est.best_sample);
    let mut r = rng(77);
    for _ in 0..20 {
        let u = random_field(&b, &mut r, 1.0);
        assert!(est.value >= kappa_ratio(&b, u.coeffs()));
    }
}

#[test]
fn zero_reference_has_zero_gamma() {
    let m = model();
    let b = m.basis();
    let (dt, steps) = (0.05, 8);
    let zero = Trajectory::zeros(b, dt, steps, TrajectoryKind::Control);
    let target = Trajectory::zeros(b, dt, steps, TrajectoryKind::Target);
    let problem = ControlProblem::new(&m, Field::zeros(b), CostConfig::new(target, 0.0, 1.0).unwrap()).unwrap();
    let opts = OptimizerOptions {
        max_iter: 5,
        vi_samples: 0,
        ..OptimizerOptions::default()
    };
    let budget = SearchBudget {
        samples: 10,
        ascent_steps: 2,
    };
    let rep = uniqueness_diagnostics(&problem, &zero, 2, 10.0, budget, &opts, 0).unwrap();
    assert_eq!(rep.gamma, 0.0);
    assert_eq!(rep.lambda_tilde, 0.0);
    assert_eq!(rep.proxy, 0.0);
    assert!(rep.kappa.value > 0.0 && rep.big_gamma.value > 0.0);
    assert!(matches!(
        uniqueness_diagnostics(&problem, &zero, 1, 10.0, budget, &opts, 0),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn stability_examples() {
    let m = model();
    let b = m.basis();
    let mut r = rng(3);
    let y0 = random_field(b, &mut r, 0.5);
    let u = random_smooth_trajectory(b, &mut r, 1.0, 0.02, 25, TrajectoryKind::Control);
    // eps = 0: identical controls.
    let zero = stability_check(&m, &y0, &u, &u, &[0.0]).unwrap();
    assert_eq!(zero.ratios, vec![0.0]);
    let psi = thirdgrade::sampling::single_mode_trajectory(b, 1, 1, 0.02, 25, TrajectoryKind::Control, |_| 1.0).unwrap();
    let table = stability_check(&m, &y0, &u, &psi, &[1e-1, 1e-2, 1e-3]).unwrap();
    assert!(table.spread <= 0.25, "{table:?}");
}

#[test]
fn initial_data_gap_decays_for_large_viscosity() {
    let params = ModelParams::new(5.0, 0.1, 0.05, 0.2).unwrap();
    let m = Model::new(SpectralBasis::new(3, 0.1).unwrap(), params).unwrap();
    let b = m.basis();
    let mut r = rng(8);
    let a = random_field(b, &mut r, 0.5);
    let c = random_field(b, &mut r, 0.5);
    let u = Trajectory::zeros(b, 0.02, 25, TrajectoryKind::Control);
    let s = initial_data_sensitivity(&m, &a, &c, &u).unwrap();
    assert!(s.sup_gap.is_finite());
    assert!(s.final_gap < 0.5 * s.initial_gap, "{s:?}");
    assert!(s.sup_gap <= s.initial_gap * (1.0 + 1e-12));
}
