use serde_json::{json, Value};
use slipline_core::verify::{verify_all, verify_solution, Comparison, VerifyConfig};

#[test]
fn full_verification_passes() {
    let report = verify_all(&VerifyConfig::default());
    let failures: Vec<String> = report.failures().map(|c| format!("{}: {} = {}", c.suite, c.name, c.value)).collect();
    assert!(report.passed, "{failures:#?}");
    assert!(report.n_checks > 200);
    for suite in ["residual", "boundary", "structure", "invariance", "dissipation", "streamline", "sensitivity"] {
        assert!(report.checks.iter().any(|c| c.suite == suite), "missing suite {suite}");
    }
    assert!(report.checks.iter().any(|c| c.comparison == Comparison::Above));
}

#[test]
fn single_solutions_and_defects() {
    let cfg = VerifyConfig { grid: 20, ..Default::default() };
    for name in ["prandtl", "nadai_two_circles", "revuzhenko_lower", "nadai"] {
        let clean = verify_solution(name, &Value::Null, None, None, &cfg).unwrap();
        assert!(clean.passed, "{name}: {:?}", clean.failures().collect::<Vec<_>>());
        let bad = verify_solution(name, &Value::Null, None, Some(0.01), &cfg).unwrap();
        assert!(!bad.passed, "{name}: defect missed");
    }
    let yak = verify_solution("yakhno", &json!({"C1": 3.0, "C2": 1.0}), None, None, &cfg).unwrap();
    assert!(yak.passed);
    assert!(verify_solution("nope", &Value::Null, None, None, &cfg).is_err());
}

#[test]
fn report_json_carries_values_and_thresholds() {
    let cfg = VerifyConfig { grid: 10, ..Default::default() };
    let r = verify_solution("nadai_vortex", &Value::Null, None, None, &cfg).unwrap();
    let v: Value = serde_json::from_str(&r.to_json()).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["value"].is_number() && c["threshold"].is_number() && c["passed"].is_boolean());
    }
}
