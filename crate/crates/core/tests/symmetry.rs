use serde_json::Value;
use slipline_core::catalog::{build, RevuzhenkoSign, SOLUTIONS};
use slipline_core::residuals::DerivativeMode;
use slipline_core::symmetry::{
    operator_for, revuzhenko_operator_check, stress_operators, structure_constant_suite, velocity_generator_checks,
    Algebra, SubalgebraTag,
};
use slipline_core::verify::{default_region, invariance_residual, negative_control};

#[test]
fn structure_constants_hold_in_both_modes() {
    for algebra in [Algebra::SigmaTheta, Algebra::SigmaThetaPolar, Algebra::Velocity] {
        for mode in [DerivativeMode::Analytic, DerivativeMode::FiniteDifference] {
            let r = structure_constant_suite(algebra, 0.5, 50, 11, mode);
            assert!(!r.checks.is_empty());
            assert!(r.max_deviation < 1e-6, "{algebra:?} {mode:?}: {:?}", r.checks);
        }
    }
}

#[test]
fn commutators_generate_the_catalog_velocities() {
    for mode in [DerivativeMode::Analytic, DerivativeMode::FiniteDifference] {
        for c in velocity_generator_checks(50, 5, mode) {
            assert!(c.max_deviation < 1e-6, "{}: {}", c.name, c.max_deviation);
        }
    }
}

#[test]
fn declared_subalgebras_leave_solutions_invariant() {
    let mut checked = 0;
    for name in SOLUTIONS.iter().filter(|n| !n.starts_with("revuzhenko")) {
        let f = build(name, &Value::Null).unwrap();
        let tag = f.subalgebra();
        if tag == SubalgebraTag::Unspecified {
            continue;
        }
        let op = operator_for(&tag, f.k(), f.frame()).unwrap();
        let v = invariance_residual(&op, f.as_ref(), default_region(name), 12, 1e-2).unwrap();
        assert!(v < 1e-7, "{name} under {}: {v}", tag.label());
        let c = invariance_residual(&negative_control(f.as_ref()), f.as_ref(), default_region(name), 12, 1e-2).unwrap();
        assert!(c > 1e-3, "{name}: negative control {c}");
        checked += 1;
    }
    assert!(checked >= 8, "{checked}");
}

#[test]
fn revuzhenko_operator_pushes_forward() {
    for (sign, xi) in [(RevuzhenkoSign::Upper, 0.3), (RevuzhenkoSign::Lower, -0.3)] {
        for eta in [0.8, 1.5, 2.7] {
            let c = revuzhenko_operator_check(sign, xi, eta).unwrap();
            assert!(c.y1_residual.abs() < 1e-9 && c.eq_u_residual.abs() < 1e-9, "{c:?}");
            assert!(c.pushforward_deviation < 1e-7, "{c:?}");
        }
    }
    assert!(revuzhenko_operator_check(RevuzhenkoSign::Upper, 0.0, 1.0).is_err());
}

#[test]
fn operator_coefficients() {
    let k = 0.5;
    let [x1, x2, x3, x4] = stress_operators(k);
    let p = [1.0, 2.0, 0.4, 0.0];
    assert_eq!(x1.coefficients(&p), [1.0, 2.0, 0.0, 0.0]);
    assert_eq!(x2.coefficients(&p), [-2.0, 1.0, 0.0, 1.0]);
    assert_eq!(x3.coefficients(&p), [0.0, 0.0, 1.0, 0.0]);
    // theta = 0: X4 = (x + y sigma/k) d_x + (-y - x sigma/k) d_y - (sigma/k) d_theta.
    let c = x4.coefficients(&p);
    let want = [1.0 + 2.0 * 0.8, -2.0 - 0.8, 0.0, -0.8];
    for i in 0..4 {
        assert!((c[i] - want[i]).abs() < 1e-14, "{c:?}");
    }
}
