use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use serde_json::{json, Value};
use slipline_core::plane::Point2;
use slipline_core::residuals::{residual_velocity, sweep_velocity, DerivativeMode, PerturbedVelocity, Region};
use slipline_core::velocity::{
    build_velocity, dissipation_at, dissipation_sign_ok, trace_streamline, StreamOptions, VelocityField, VELOCITY_FIELDS,
};

fn strip() -> Region {
    Region::cartesian(-2.0, 2.0, -0.99, 0.99)
}

fn field(name: &str, params: Value) -> Box<dyn VelocityField> {
    build_velocity(name, &params).unwrap()
}

#[test]
fn catalog_fields_are_compatible_with_their_stresses() {
    let cases = [
        ("nadai", Value::Null),
        ("yakhno", json!({"C1": 3.0, "C2": PI})),
        ("senashov", json!({"c1": 0.5, "c2": -1.0})),
        ("theta2", json!({"c1": 0.5, "c2": -1.0})),
        ("theta3", json!({"c1": 0.3, "c2": 1.0})),
        ("theta4", json!({"const": 0.2})),
    ];
    assert_eq!(cases.len() + 1, VELOCITY_FIELDS.len());
    for (name, params) in cases {
        let vf = field(name, params);
        let a = sweep_velocity(vf.as_ref(), strip(), 30, DerivativeMode::Analytic, 1e-2);
        let d = sweep_velocity(vf.as_ref(), strip(), 30, DerivativeMode::FiniteDifference, 1e-2);
        assert!(a.max_abs_residual < 1e-9 && d.max_abs_residual < 1e-6, "{name}: {a:?} {d:?}");
        let bad = PerturbedVelocity::new(vf, 1e-2);
        let b = sweep_velocity(&bad, strip(), 30, DerivativeMode::FiniteDifference, 1e-2);
        assert!(b.max_abs_residual > 1e-3, "{name}: defect missed");
    }
}

#[test]
fn nadai_and_yakhno_dissipation() {
    let nadai = field("nadai", Value::Null);
    let yakhno = field("yakhno", json!({"C1": 3.0, "C2": PI}));
    for (x, y) in [(0.0, 0.0), (1.5, 0.5), (-1.0, -0.9), (3.0, 0.2)] {
        let s = (1.0f64 - y * y).sqrt();
        let p = Point2::cartesian(x, y);
        assert!((dissipation_at(nadai.as_ref(), &p).unwrap() - 1.0 / s).abs() < 1e-10);
        assert!((dissipation_at(yakhno.as_ref(), &p).unwrap() - 2.0 * (x - 2.0 * s) / s).abs() < 1e-10);
    }
    // Negative dissipation is flagged rather than hidden.
    let p = Point2::cartesian(0.0, 0.0);
    assert!(!dissipation_sign_ok(yakhno.as_ref(), yakhno.background(), &p).unwrap());
    assert!(dissipation_sign_ok(nadai.as_ref(), nadai.background(), &p).unwrap());
}

#[test]
fn theta2_plate_motion() {
    let c2 = -2.0;
    let vf = field("theta2", json!({"c1": 0.0, "c2": c2}));
    for x in [-1.0f64, 0.0, 2.5] {
        let e = (-0.5 * x).exp();
        for sign in [1.0, -1.0] {
            let [u, v] = vf.eval(&Point2::cartesian(x, sign)).unwrap();
            assert!((u - c2 * (FRAC_PI_2 - 1.0) * e).abs() < 1e-10);
            assert!((v - sign * c2 * (1.0 + FRAC_PI_2) * e).abs() < 1e-10);
        }
    }
}

#[test]
fn streamlines_stay_in_the_strip() {
    let vf = field("nadai", Value::Null);
    let opts = StreamOptions { max_arclen: 20.0, ..Default::default() };
    for backward in [false, true] {
        let line = trace_streamline(vf.as_ref(), &Point2::cartesian(0.0, 0.5), &StreamOptions { backward, ..opts }).unwrap();
        assert!(line.vertices.iter().all(|v| v.y.abs() < 1.0 && v.diss_ok));
        for w in line.vertices.windows(2) {
            assert!(w[1].s > w[0].s && ((w[1].x - w[0].x).hypot(w[1].y - w[0].y) - (w[1].s - w[0].s)).abs() < 1e-6);
        }
    }
}

#[test]
fn unknown_fields_and_bad_parameters_are_rejected() {
    assert!(build_velocity("prandtl_velocity", &Value::Null).is_err());
    assert!(build_velocity("yakhno", &json!({"C3": 1.0})).is_err());
}

proptest! {
    #[test]
    fn yakhno_family_is_compatible(c1 in -5.0f64..5.0, c2 in -5.0f64..5.0, x in -3.0f64..3.0, y in -0.98f64..0.98) {
        let vf = field("yakhno", json!({"C1": c1, "C2": c2}));
        let r = residual_velocity(vf.as_ref(), vf.background(), &Point2::cartesian(x, y), DerivativeMode::Analytic).unwrap();
        prop_assert!(r[0].abs() < 1e-9 && r[1].abs() < 1e-9);
    }

    #[test]
    fn nadai_stream_function_is_constant(x in -2.0f64..2.0, y in -0.9f64..0.9) {
        let vf = field("nadai", Value::Null);
        let psi = |x: f64, y: f64| x * y - y * (1.0 - y * y).sqrt() - y.asin();
        let line = trace_streamline(vf.as_ref(), &Point2::cartesian(x, y), &StreamOptions { max_arclen: 0.3, ..Default::default() }).unwrap();
        let p0 = psi(x, y);
        for v in &line.vertices {
            prop_assert!((psi(v.x, v.y) - p0).abs() < 1e-8);
        }
    }
}
