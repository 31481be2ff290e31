use std::f64::consts::PI;

use proptest::prelude::*;
use serde_json::{json, Value};
use slipline_core::catalog::{build, CharacteristicField, CharCoords, Perturbed, Revuzhenko, RevuzhenkoSign, SOLUTIONS};
use slipline_core::plane::{components_to_levy, levy_to_components, AngleBranch, Point2, DEFAULT_YIELD_TOL};
use slipline_core::residuals::{residual_characteristic, residual_stress, sweep_stress, DerivativeMode, Region, System};
use slipline_core::verify::default_region;

fn plane_solutions() -> impl Iterator<Item = &'static str> {
    SOLUTIONS.iter().copied().filter(|n| !n.starts_with("revuzhenko"))
}

#[test]
fn every_solution_solves_the_equilibrium_system() {
    for name in plane_solutions() {
        let f = build(name, &Value::Null).unwrap();
        let region = default_region(name);
        for (mode, tol) in [(DerivativeMode::Analytic, 1e-9), (DerivativeMode::FiniteDifference, 1e-4)] {
            let r = sweep_stress(f.as_ref(), System::Cartesian, region, 30, mode, 1e-2);
            assert!(r.evaluated > 0, "{name}: nothing evaluated");
            assert!(r.max_abs_residual <= tol * f.k(), "{name} {mode:?}: {}", r.max_abs_residual);
        }
    }
}

#[test]
fn polar_and_cartesian_residuals_agree_on_zero() {
    for name in ["nadai_cavity", "nadai_vortex", "nadai_two_circles"] {
        let f = build(name, &Value::Null).unwrap();
        let r = sweep_stress(f.as_ref(), System::Polar, default_region(name), 20, DerivativeMode::Analytic, 1e-2);
        assert!(r.max_abs_residual < 1e-9, "{name}: {}", r.max_abs_residual);
    }
}

#[test]
fn injected_defects_are_detected() {
    for name in plane_solutions() {
        let f = Perturbed::new(build(name, &Value::Null).unwrap(), 1e-2);
        let r = sweep_stress(&f, System::Cartesian, default_region(name), 30, DerivativeMode::FiniteDifference, 1e-2);
        assert!(r.max_abs_residual > 1e-3, "{name}: {}", r.max_abs_residual);
    }
}

#[test]
fn outside_points_are_domain_errors() {
    let f = build("nadai_two_circles", &json!({"a": 1.0, "b": 2.0})).unwrap();
    let e = f.state(&Point2::polar(3.0, 0.0).unwrap()).unwrap_err();
    assert!(e.is_domain_error(), "{e}");
    let p = build("prandtl", &Value::Null).unwrap();
    assert!(p.state(&Point2::cartesian(0.0, 1.5)).unwrap_err().is_domain_error());
}

#[test]
fn revuzhenko_solves_the_system_in_both_signs() {
    for sign in [RevuzhenkoSign::Upper, RevuzhenkoSign::Lower] {
        let f = Revuzhenko::new(sign);
        let xi = if sign == RevuzhenkoSign::Upper { 0.3 } else { -0.3 };
        let (p, s) = f.state(CharCoords::new(xi, 1.5)).unwrap();
        let r = residual_characteristic(&f, CharCoords::new(xi, 1.5), DerivativeMode::Analytic).unwrap();
        assert!(r[0].abs() < 1e-9 && r[1].abs() < 1e-9, "{r:?}");
        assert!(p.xy().iter().all(|v| v.is_finite()));
        let fs = levy_to_components(&s);
        assert!(fs.yield_residual(f.k()).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn yield_identity_holds_everywhere(x in -2.0f64..2.0, y in -0.999f64..0.999, c in -3.0f64..3.0, k in 0.1f64..5.0) {
        let f = build("prandtl", &json!({"c": c, "k": k})).unwrap();
        let s = f.state(&Point2::cartesian(x, y)).unwrap();
        let fs = levy_to_components(&s);
        prop_assert!(((fs.sigma_x - fs.sigma_y).powi(2) + 4.0 * fs.tau_xy.powi(2) - 4.0 * k * k).abs() <= 1e-12 * k * k * 16.0);
    }

    #[test]
    fn levy_round_trip(sigma in -10.0f64..10.0, theta in -PI / 2.0 + 1e-6..PI / 2.0 - 1e-6, k in 0.1f64..5.0) {
        let s = slipline_core::plane::StressState { sigma, theta, k };
        let fs = levy_to_components(&s);
        let back = components_to_levy(&fs, k, AngleBranch::Principal, DEFAULT_YIELD_TOL).unwrap();
        prop_assert!((back.sigma - sigma).abs() < 1e-9 * (1.0 + sigma.abs()));
        prop_assert!((back.theta - theta).abs() < 1e-7);
    }

    #[test]
    fn vortex_residual_vanishes(r in 1.05f64..4.0, phi in -PI..PI) {
        let f = build("nadai_vortex", &Value::Null).unwrap();
        let res = residual_stress(f.as_ref(), &Point2::polar(r, phi).unwrap(), DerivativeMode::Analytic).unwrap();
        prop_assert!(res[0].abs() < 1e-10 && res[1].abs() < 1e-10);
    }
}

#[test]
fn region_lattice_covers_edges() {
    let r = Region::cartesian(-1.0, 1.0, 0.0, 2.0);
    let pts = r.lattice(3);
    assert_eq!(pts.len(), 9);
    assert_eq!(pts[0], [-1.0, 0.0]);
    assert_eq!(pts[8], [1.0, 2.0]);
}
