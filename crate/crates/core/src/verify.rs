//! Verification suites over the whole catalog: residual sweeps, boundary
//! values, structure constants, invariance, dissipation and streamlines.
//!
//! Each suite yields named [`Check`]s with a measured value and the threshold
//! it is held to; a [`VerifyReport`] passes iff every check passes.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;
use serde_json::Value;

use crate::catalog::{
    build, build_characteristic, CharCoords, CharacteristicField, NadaiCavity, NadaiChannel, NadaiChannelSingular,
    NadaiTwoCircles, NadaiVortex, Perturbed, PerturbedChar, Prandtl, Revuzhenko, RevuzhenkoSign, SimpleWave,
    Spiral, StressField, ThetaBracket,
};
use crate::error::{Error, Result};
use crate::plane::{levy_to_components, Frame, FunctionParam, Point2, StressState};
use crate::residuals::{
    position_jacobian_det, sweep_characteristic, sweep_stress, sweep_velocity, DerivativeMode, Region,
    ResidualReport, System,
};
use crate::symmetry::{
    check_invariance, check_invariance_characteristic, operator_for, polar_operators, revuzhenko_operator,
    stress_operators, structure_constant_suite, velocity_generator_checks, Algebra, LieOperator,
};
use crate::velocity::{
    build_velocity, dissipation_at, theta2_plate_values, trace_streamline, NadaiVelocity, StreamOptions,
    Theta2Velocity, VelocityField, YakhnoVelocity, THETA4_QUAD_TOL,
};

/// Grid size of the residual sweeps.
pub const SWEEP_N: usize = 50;
/// Random points of the structure-constant suites.
pub const STRUCTURE_POINTS: usize = 100;
/// Residual a perturbed field must exceed to count as detected.
pub const DEFECT_THRESHOLD: f64 = 1e-3;
/// Magnitude of the defect injected by the sensitivity suite.
pub const DEFECT_EPS: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Passes when `value <= threshold`.
    AtMost,
    /// Passes when `value > threshold` (defects and negative controls).
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn at_most(suite: &str, name: impl Into<String>, value: f64, threshold: f64) -> Check {
        Check {
            suite: suite.into(),
            name: name.into(),
            value,
            threshold,
            comparison: Comparison::AtMost,
            passed: value <= threshold,
            detail: None,
        }
    }

    pub fn above(suite: &str, name: impl Into<String>, value: f64, threshold: f64) -> Check {
        Check {
            suite: suite.into(),
            name: name.into(),
            value,
            threshold,
            comparison: Comparison::Above,
            passed: value > threshold,
            detail: None,
        }
    }

    /// A check that could not be evaluated at all.
    pub fn failed(suite: &str, name: impl Into<String>, err: impl ToString) -> Check {
        Check {
            suite: suite.into(),
            name: name.into(),
            value: f64::NAN,
            threshold: 0.0,
            comparison: Comparison::AtMost,
            passed: false,
            detail: Some(err.to_string()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Check {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub n_checks: usize,
    pub n_failed: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn new(checks: Vec<Check>) -> Self {
        let n_failed = checks.iter().filter(|c| !c.passed).count();
        VerifyReport { passed: n_failed == 0, n_checks: checks.len(), n_failed, checks }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Settings shared by the suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub grid: usize,
    pub structure_points: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { grid: SWEEP_N, structure_points: STRUCTURE_POINTS, seed: 1 }
    }
}

/// A catalog stress field with the region it is swept over.
#[derive(Debug)]
pub struct StressCase {
    pub label: String,
    pub field: Box<dyn StressField>,
    pub region: Region,
    /// Points closer than this to a singular boundary are excluded.
    pub margin: f64,
}

impl StressCase {
    fn new(label: &str, field: impl StressField + 'static, region: Region, margin: f64) -> Self {
        StressCase { label: label.into(), field: Box::new(field), region, margin }
    }
}

fn channel_case(label: &str, c: f64) -> StressCase {
    let ch = NadaiChannel::new(c, 0.5, 0.0, 0.0).expect("valid channel");
    let region = if ch.has_walls() {
        let (lo, hi) = ch.psi_bracket();
        let (a, b) = (ch.phi_of_psi(lo), ch.phi_of_psi(hi));
        Region::polar(0.5, 2.0, a.min(b), a.max(b))
    } else {
        Region::polar(0.5, 2.0, -PI, PI)
    };
    StressCase::new(label, ch, region, 1e-2)
}

fn strip() -> Region {
    Region::cartesian(-2.0, 2.0, -0.99, 0.99)
}

/// The stress fields covered by the residual suite, each with `k = 1/2`.
pub fn stress_cases() -> Vec<StressCase> {
    let k = 0.5;
    let quadratic = || FunctionParam::polynomial(vec![1.0, 0.0, 1.0]);
    let wave_box = Region::cartesian(-3.0, 3.0, -3.0, 3.0);
    let wave_bracket = ThetaBracket::Fixed { lo: 0.3, hi: 1.2 };
    vec![
        StressCase::new("prandtl", Prandtl::default(), strip(), 5e-3),
        StressCase::new(
            "nadai_cavity",
            NadaiCavity::new(1.0, 0.0, k).expect("valid"),
            Region::polar(1.0, 3.0, -3.0, 3.0),
            1e-2,
        ),
        StressCase::new(
            "nadai_vortex",
            NadaiVortex::new(1.0, 0.0, k).expect("valid"),
            Region::polar(1.0, 3.0, -3.0, 3.0),
            1e-2,
        ),
        channel_case("nadai_channel(c=2)", 2.0),
        channel_case("nadai_channel(c=0.5)", 0.5),
        StressCase::new(
            "nadai_channel_singular",
            NadaiChannelSingular::new(k, 0.0).expect("valid"),
            Region::polar(0.5, 2.0, -3.0, 3.0),
            1e-2,
        ),
        StressCase::new(
            "nadai_two_circles",
            NadaiTwoCircles::new(1.0, SQRT_2, k).expect("valid"),
            Region::polar(1.0, SQRT_2, -3.0, 3.0),
            1e-2,
        ),
        StressCase::new(
            "spiral(alpha=1, A=2 sqrt2 k)",
            Spiral::canonical(k).expect("valid"),
            Region::polar(0.2, 5.0, -1.5, 1.5),
            1e-2,
        ),
        StressCase::new(
            "simple_wave(n=0, Phi=1+t^2)",
            SimpleWave::new(quadratic(), 0, 0.0, k, wave_bracket).expect("valid"),
            wave_box,
            1e-2,
        ),
        StressCase::new(
            "simple_wave(n=1, Phi=1+t^2)",
            SimpleWave::new(quadratic(), 1, 0.0, k, wave_bracket).expect("valid"),
            wave_box,
            1e-2,
        ),
        StressCase::new(
            "simple_wave_fan",
            SimpleWave::fan(0, k).expect("valid"),
            Region::cartesian(-2.0, 2.0, -2.0, -0.1),
            1e-2,
        ),
        StressCase::new("spiral_2(C=1)", SimpleWave::spiral(1.0, k, 0.0).expect("valid"), wave_box, 1e-2),
    ]
}

/// The characteristic-net region swept for each Revuzhenko sign.
pub fn revuzhenko_box(sign: RevuzhenkoSign) -> Region {
    match sign {
        RevuzhenkoSign::Lower => Region::cartesian(-0.45, -0.2, 0.7, 3.0),
        RevuzhenkoSign::Upper => Region::cartesian(0.2, 0.45, 0.7, 3.0),
    }
}

/// A catalog velocity field with its sweep region.
#[derive(Debug)]
pub struct VelocityCase {
    pub label: String,
    pub field: Box<dyn VelocityField>,
    pub region: Region,
    pub margin: f64,
    /// Analytic-mode threshold; quadrature-based fields are held to their
    /// quadrature accuracy instead of round-off.
    pub analytic_threshold: f64,
}

/// The seven catalog velocity fields with representative constants.
pub fn velocity_cases() -> Vec<VelocityCase> {
    let specs: [(&str, Value); 7] = [
        ("nadai", Value::Null),
        ("yakhno", serde_json::json!({"C1": 3.0, "C2": PI})),
        ("senashov", serde_json::json!({"c1": 0.5, "c2": -1.0})),
        ("theta2", serde_json::json!({"c1": 0.5, "c2": -1.0})),
        ("theta3", serde_json::json!({"c1": 0.3, "c2": 1.0})),
        ("theta4", serde_json::json!({"const": 0.2})),
        (
            "simple_wave_velocity",
            serde_json::json!({"C": 1.0, "line": {"kind": "polynomial", "coeffs": [1.0, 0.5]},
                               "transverse": {"kind": "polynomial", "coeffs": [0.0, 1.0, 0.25]}}),
        ),
    ];
    specs
        .into_iter()
        .map(|(name, params)| {
            let field = build_velocity(name, &params).expect("catalog velocity parameters are valid");
            let region = if name == "simple_wave_velocity" {
                Region::cartesian(-3.0, 3.0, -3.0, 3.0)
            } else {
                strip()
            };
            let analytic_threshold = if name == "theta4" { 1e-9f64.max(10.0 * THETA4_QUAD_TOL) } else { 1e-9 };
            VelocityCase { label: name.into(), field, region, margin: 1e-2, analytic_threshold }
        })
        .collect()
}

fn sweep_checks(label: &str, r: &ResidualReport, threshold: f64) -> Check {
    let name = format!("{label} {:?} {:?}", r.system, r.mode);
    if r.evaluated == 0 {
        return Check::failed("residual", name, "no grid point inside the domain");
    }
    let value = if r.max_abs_residual.is_nan() { f64::INFINITY } else { r.max_abs_residual };
    Check::at_most("residual", name, value, threshold)
        .with_detail(format!("{} of {} points evaluated", r.evaluated, r.evaluated + r.excluded))
}

/// Equilibrium residuals (analytic and finite-difference partials) and the
/// yield identity of one stress field over `n x n` points.
pub fn stress_residual_checks(label: &str, field: &dyn StressField, region: Region, n: usize, margin: f64) -> Vec<Check> {
    let k = field.k();
    let mut out = Vec::new();
    for (mode, tol) in [(DerivativeMode::Analytic, 1e-9 * k), (DerivativeMode::FiniteDifference, 1e-4 * k)] {
        let r = sweep_stress(field, System::Cartesian, region, n, mode, margin);
        out.push(sweep_checks(label, &r, tol));
    }
    let r = sweep_stress(field, System::Yield, region, n, DerivativeMode::Analytic, margin);
    out.push(sweep_checks(label, &r, 1e-12 * k * k));
    out
}

pub fn characteristic_residual_checks(label: &str, field: &dyn CharacteristicField, region: Region, n: usize) -> Vec<Check> {
    let k = field.k();
    [(DerivativeMode::Analytic, 1e-9 * k), (DerivativeMode::FiniteDifference, 1e-4 * k)]
        .into_iter()
        .map(|(mode, tol)| sweep_checks(label, &sweep_characteristic(field, region, n, mode, 1e-2), tol))
        .collect()
}

pub fn velocity_residual_checks(case: &VelocityCase, n: usize) -> Vec<Check> {
    [(DerivativeMode::Analytic, case.analytic_threshold), (DerivativeMode::FiniteDifference, 1e-6)]
        .into_iter()
        .map(|(mode, tol)| sweep_checks(&case.label, &sweep_velocity(case.field.as_ref(), case.region, n, mode, case.margin), tol))
        .collect()
}

/// Residual suite over every stress, characteristic and velocity field.
pub fn residual_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for case in stress_cases() {
        out.extend(stress_residual_checks(&case.label, case.field.as_ref(), case.region, cfg.grid, case.margin));
    }
    for sign in [RevuzhenkoSign::Upper, RevuzhenkoSign::Lower] {
        let f = Revuzhenko::new(sign);
        out.extend(characteristic_residual_checks(&format!("revuzhenko({sign:?})"), &f, revuzhenko_box(sign), cfg.grid));
    }
    for case in velocity_cases() {
        out.extend(velocity_residual_checks(&case, cfg.grid));
    }
    out
}

fn samples(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn max_over(it: impl Iterator<Item = Result<f64>>) -> Result<f64> {
    let mut m = 0.0f64;
    for v in it {
        let v = v?.abs();
        m = if v.is_nan() { f64::NAN } else { m.max(v) };
    }
    Ok(m)
}

fn bc_check(name: &str, value: Result<f64>) -> Check {
    match value {
        Ok(v) => Check::at_most("boundary", name, v, 1e-10),
        Err(e) => Check::failed("boundary", name, e),
    }
}

/// Stress components in the local polar basis: `(sigma_r, sigma_phi, tau_rphi)`.
fn polar_components(field: &dyn StressField, r: f64, phi: f64) -> Result<[f64; 3]> {
    let s = field.state(&Point2::polar(r, phi)?)?;
    let fs = levy_to_components(&StressState { theta: s.theta - phi, ..s });
    Ok([fs.sigma_x, fs.sigma_y, fs.tau_xy])
}

/// Boundary values stated for the closed-form solutions, compared on 21
/// boundary points each.
pub fn boundary_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let xs: Vec<f64> = samples(-2.0, 2.0, 21).collect();
    let phis: Vec<f64> = samples(-3.0, 3.0, 21).collect();
    for (m, h, k) in [(1.0, 1.0, 0.5), (0.5, 2.0, 1.0)] {
        let f = Prandtl::new(0.0, m, h, k).expect("valid");
        for sign in [1.0, -1.0] {
            let v = max_over(xs.iter().map(|&x| {
                let s = f.state(&Point2::cartesian(x, sign * h))?;
                Ok(levy_to_components(&s).tau_xy - sign * m * k)
            }));
            out.push(bc_check(&format!("prandtl(m={m}, h={h}) tau_xy(y={sign}h) = {sign} mk"), v));
        }
    }
    let k = 0.5;
    let circles = NadaiTwoCircles::new(1.0, SQRT_2, k).expect("valid");
    for (r, want, label) in [(1.0, -k, "a"), (SQRT_2, k, "b")] {
        let v = max_over(phis.iter().map(|&phi| Ok(polar_components(&circles, r, phi)?[2] - want)));
        out.push(bc_check(&format!("nadai_two_circles tau_rphi(r={label}) = {want}"), v));
    }
    let p = 0.3;
    let vortex = NadaiVortex::new(1.0, p, k).expect("valid");
    let v = max_over(phis.iter().map(|&phi| Ok(polar_components(&vortex, 1.0, phi)?[2] + k)));
    out.push(bc_check("nadai_vortex tau_rphi(R) = -k", v));
    let v = max_over(phis.iter().map(|&phi| Ok(vortex.state(&Point2::polar(1.0, phi)?)?.sigma + p)));
    out.push(bc_check("nadai_vortex sigma(R) = -p", v));

    let yakhno = YakhnoVelocity { c1: 3.0, c2: PI };
    let theta2 = Theta2Velocity { c1: 0.0, c2: -1.0 };
    for sign in [1.0, -1.0] {
        let at = |vf: &dyn VelocityField, x: f64| vf.eval(&Point2::cartesian(x, sign));
        let v = max_over(xs.iter().map(|&x| {
            let [u, v] = at(&NadaiVelocity, x)?;
            Ok((u - x).abs().max((v + sign).abs()))
        }));
        out.push(bc_check(&format!("nadai velocity u(x,{sign})=x, v=-({sign})"), v));
        let v = max_over(xs.iter().map(|&x| {
            let [u, v] = at(&yakhno, x)?;
            Ok((u - x * x).abs().max((v + sign * (2.0 * x - PI)).abs()))
        }));
        out.push(bc_check(&format!("yakhno(C1=3, C2=pi) u(x,{sign})=x^2, v=-({sign})(2x-pi)"), v));
        let v = max_over(xs.iter().map(|&x| {
            let [u, v] = at(&theta2, x)?;
            let [ue, ve] = theta2_plate_values(theta2.c2, x, sign > 0.0);
            Ok((u - ue).abs().max((v - ve).abs()))
        }));
        out.push(bc_check(&format!("theta2(c1=0, c2=-1) plate values at y={sign}"), v));
    }
    out
}

/// Commutation relations, antisymmetry and Jacobi identity of the three
/// algebras in both derivative modes, plus the commutator-generated velocities.
pub fn structure_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for algebra in [Algebra::SigmaTheta, Algebra::SigmaThetaPolar, Algebra::Velocity] {
        for mode in [DerivativeMode::Analytic, DerivativeMode::FiniteDifference] {
            let rep = structure_constant_suite(algebra, 0.5, cfg.structure_points, cfg.seed, mode);
            for c in rep.checks {
                out.push(Check::at_most("structure", format!("{algebra:?} {mode:?} {}", c.name), c.max_deviation, 1e-6));
            }
        }
    }
    for mode in [DerivativeMode::Analytic, DerivativeMode::FiniteDifference] {
        for c in velocity_generator_checks(cfg.structure_points, cfg.seed, mode) {
            out.push(Check::at_most("structure", format!("{mode:?} {}", c.name), c.max_deviation, 1e-6));
        }
    }
    out
}

/// Largest invariance residual of `field` under `op` over the sweep lattice.
pub fn invariance_residual(op: &LieOperator<4>, field: &dyn StressField, region: Region, n: usize, margin: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut seen = 0;
    for c in region.lattice(n) {
        let Ok(p) = Point2::new(region.frame, c[0], c[1]) else { continue };
        if !field.contains(&p) || field.boundary_distance(&p) < margin {
            continue;
        }
        let r = check_invariance(op, field, &p, DerivativeMode::Analytic)?;
        worst = worst.max(r[0].abs()).max(r[1].abs());
        seen += 1;
    }
    if seen == 0 {
        return Err(Error::StartOutsideDomain);
    }
    Ok(worst)
}

pub fn revuzhenko_invariance_residual(op: &LieOperator<4>, sign: RevuzhenkoSign, n: usize) -> Result<f64> {
    let f = Revuzhenko::new(sign);
    let mut worst = 0.0f64;
    for c in revuzhenko_box(sign).lattice(n) {
        let cc = CharCoords::new(c[0], c[1]);
        let j = f.jacobian(cc)?;
        let scale = (j[0][0] * j[1][1]).abs() + (j[0][1] * j[1][0]).abs();
        if position_jacobian_det(&j).abs() < 1e-2 * scale {
            continue;
        }
        let r = check_invariance_characteristic(op, &f, cc, DerivativeMode::Analytic)?;
        worst = worst.max(r[0].abs()).max(r[1].abs());
    }
    Ok(worst)
}

/// The non-symmetry used as a negative control: a rotation for cartesian
/// fields, a dilation for polar ones.
pub fn negative_control(field: &dyn StressField) -> LieOperator<4> {
    match field.frame() {
        Frame::Cartesian => stress_operators(field.k())[1].clone(),
        Frame::Polar => polar_operators(field.k())[0].clone(),
    }
}

/// Every declared (solution, subalgebra) pair passes at 1e-7; the negative
/// control of each solution fails by more than [`DEFECT_THRESHOLD`].
pub fn invariance_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let n = (cfg.grid / 5).max(4);
    let mut out = Vec::new();
    for case in stress_cases() {
        let f = case.field.as_ref();
        let tag = f.subalgebra();
        let Ok(op) = operator_for(&tag, f.k(), f.frame()) else { continue };
        let name = format!("{} invariant under {}", case.label, tag.label());
        out.push(match invariance_residual(&op, f, case.region, n, case.margin) {
            Ok(v) => Check::at_most("invariance", name, v, 1e-7),
            Err(e) => Check::failed("invariance", name, e),
        });
        let control = negative_control(f);
        let name = format!("{} negative control {}", case.label, control.name());
        out.push(match invariance_residual(&control, f, case.region, n, case.margin) {
            Ok(v) => Check::above("invariance", name, v, DEFECT_THRESHOLD),
            Err(e) => Check::failed("invariance", name, e),
        });
    }
    for sign in [RevuzhenkoSign::Upper, RevuzhenkoSign::Lower] {
        let op = revuzhenko_operator(0.5);
        let name = format!("revuzhenko({sign:?}) invariant under {}", op.name());
        out.push(match revuzhenko_invariance_residual(&op, sign, n) {
            Ok(v) => Check::at_most("invariance", name, v, 1e-7),
            Err(e) => Check::failed("invariance", name, e),
        });
        let control = polar_operators(0.5)[0].clone();
        let name = format!("revuzhenko({sign:?}) negative control {}", control.name());
        out.push(match revuzhenko_invariance_residual(&control, sign, n) {
            Ok(v) => Check::above("invariance", name, v, DEFECT_THRESHOLD),
            Err(e) => Check::failed("invariance", name, e),
        });
    }
    out
}

/// Dissipation of the Nadai and yakhno fields against their closed forms, and
/// the sign of the separable field with `c2 < 0`.
pub fn dissipation_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let lattice = strip().lattice(cfg.grid);
    let yakhno = YakhnoVelocity { c1: 3.0, c2: PI };
    let worst = |f: &dyn Fn(f64, f64) -> Result<f64>| max_over(lattice.iter().map(|c| f(c[0], c[1])));
    let mut out = Vec::new();
    let nadai = worst(&|x, y| Ok(dissipation_at(&NadaiVelocity, &Point2::cartesian(x, y))? - 1.0 / (1.0 - y * y).sqrt()));
    out.push(match nadai {
        Ok(v) => Check::at_most("dissipation", "nadai D = 1/sqrt(1-y^2)", v, 1e-8),
        Err(e) => Check::failed("dissipation", "nadai D", e),
    });
    let yk = worst(&|x, y| {
        let s = (1.0 - y * y).sqrt();
        Ok(dissipation_at(&yakhno, &Point2::cartesian(x, y))? - 2.0 * (x - 2.0 * s) / s)
    });
    out.push(match yk {
        Ok(v) => Check::at_most("dissipation", "yakhno D = 2(x - 2 sqrt(1-y^2))/sqrt(1-y^2)", v, 1e-8),
        Err(e) => Check::failed("dissipation", "yakhno D", e),
    });
    let theta2 = Theta2Velocity { c1: 0.0, c2: -1.0 };
    let mut min_d = f64::INFINITY;
    for c in &lattice {
        if c[1] == 0.0 {
            continue;
        }
        match dissipation_at(&theta2, &Point2::cartesian(c[0], c[1])) {
            Ok(d) => min_d = min_d.min(d),
            Err(e) => {
                out.push(Check::failed("dissipation", "theta2(c2<0) D >= 0", e));
                return out;
            }
        }
    }
    out.push(Check::at_most("dissipation", "theta2(c1=0, c2=-1) -min D", -min_d, 0.0));
    out
}

/// `x y - y sqrt(1-y^2) - arcsin y`, constant along Nadai streamlines.
pub fn nadai_stream_function(x: f64, y: f64) -> f64 {
    x * y - y * (1.0 - y * y).sqrt() - y.asin()
}

/// `2x arccos y + y x^2 - 2xy sqrt(1-y^2) - pi x - y^3 + 3y`, constant along
/// streamlines of the yakhno field with `C1 = 3`, `C2 = pi`.
pub fn yakhno_stream_function(x: f64, y: f64) -> f64 {
    let s = (1.0 - y * y).sqrt();
    2.0 * x * y.acos() + y * x * x - 2.0 * x * y * s - PI * x - y.powi(3) + 3.0 * y
}

/// `x - sqrt(1-y^2) - ln(1 - sqrt(1-y^2))`, constant along streamlines of the
/// separable field with `c2 = 0`.
pub fn theta2_stream_function(x: f64, y: f64) -> f64 {
    let s = (1.0 - y * y).sqrt();
    x - s - (1.0 - s).ln()
}

/// Largest drift of `invariant` along unit-length streamlines from `starts`.
pub fn streamline_drift(vf: &dyn VelocityField, invariant: impl Fn(f64, f64) -> f64, starts: &[[f64; 2]]) -> Result<f64> {
    let mut worst = 0.0f64;
    for s in starts {
        let line = trace_streamline(vf, &Point2::cartesian(s[0], s[1]), &StreamOptions::default())?;
        let i0 = invariant(s[0], s[1]);
        for v in &line.vertices {
            worst = worst.max((invariant(v.x, v.y) - i0).abs());
        }
    }
    Ok(worst)
}

pub fn streamline_suite() -> Vec<Check> {
    let starts = [[0.5, 0.3], [1.5, -0.4], [-1.0, 0.6], [3.0, 0.2]];
    let theta2 = Theta2Velocity { c1: 1.0, c2: 0.0 };
    let cases: [(&str, &dyn VelocityField, fn(f64, f64) -> f64); 3] = [
        ("nadai", &NadaiVelocity, nadai_stream_function),
        ("yakhno(C1=3, C2=pi)", &YakhnoVelocity { c1: 3.0, c2: PI }, yakhno_stream_function),
        ("theta2(c1=1, c2=0)", &theta2, theta2_stream_function),
    ];
    cases
        .into_iter()
        .map(|(label, vf, inv)| {
            let name = format!("{label} stream function conserved");
            match streamline_drift(vf, inv, &starts) {
                Ok(v) => Check::at_most("streamline", name, v, 1e-4),
                Err(e) => Check::failed("streamline", name, e),
            }
        })
        .collect()
}

/// A 1e-2 defect injected into each field must lift its residual above
/// [`DEFECT_THRESHOLD`].
pub fn sensitivity_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for case in stress_cases() {
        let bad = Perturbed::new(case.field, DEFECT_EPS);
        let r = sweep_stress(&bad, System::Cartesian, case.region, cfg.grid, DerivativeMode::FiniteDifference, case.margin);
        out.push(Check::above("sensitivity", format!("{} + defect", case.label), r.max_abs_residual, DEFECT_THRESHOLD));
    }
    for sign in [RevuzhenkoSign::Upper, RevuzhenkoSign::Lower] {
        let bad = PerturbedChar::new(Revuzhenko::new(sign), DEFECT_EPS);
        let r = sweep_characteristic(&bad, revuzhenko_box(sign), cfg.grid, DerivativeMode::FiniteDifference, 1e-2);
        out.push(Check::above("sensitivity", format!("revuzhenko({sign:?}) + defect"), r.max_abs_residual, DEFECT_THRESHOLD));
    }
    for case in velocity_cases() {
        let bad = crate::residuals::PerturbedVelocity::new(case.field, DEFECT_EPS);
        let r = sweep_velocity(&bad, case.region, cfg.grid, DerivativeMode::FiniteDifference, case.margin);
        out.push(Check::above("sensitivity", format!("{} + defect", case.label), r.max_abs_residual, DEFECT_THRESHOLD));
    }
    out
}

/// Every suite.
pub fn verify_all(cfg: &VerifyConfig) -> VerifyReport {
    let mut checks = residual_suite(cfg);
    checks.extend(boundary_suite());
    checks.extend(structure_suite(cfg));
    checks.extend(invariance_suite(cfg));
    checks.extend(dissipation_suite(cfg));
    checks.extend(streamline_suite());
    checks.extend(sensitivity_suite(cfg));
    VerifyReport::new(checks)
}

/// A region covering the documented domain of a named solution.
pub fn default_region(name: &str) -> Region {
    match name {
        "nadai_cavity" | "nadai_vortex" => Region::polar(1.0, 3.0, -3.0, 3.0),
        "nadai_channel" | "nadai_channel_unit" | "nadai_channel_singular" => Region::polar(0.5, 2.0, -PI, PI),
        "nadai_two_circles" => Region::polar(1.0, SQRT_2, -3.0, 3.0),
        "spiral" => Region::polar(0.2, 5.0, -1.5, 1.5),
        "simple_wave" | "simple_wave_fan" | "spiral_2" => Region::cartesian(-3.0, 3.0, -3.0, 3.0),
        _ => strip(),
    }
}

/// Residual (and, where declared, invariance) checks for one named solution,
/// optionally with an injected defect of size `perturb`. Stress, characteristic
/// and velocity names are all accepted.
pub fn verify_solution(
    name: &str,
    params: &Value,
    region: Option<Region>,
    perturb: Option<f64>,
    cfg: &VerifyConfig,
) -> Result<VerifyReport> {
    let eps = perturb.unwrap_or(0.0);
    if name.starts_with("revuzhenko") {
        let f = build_characteristic(name, params)?;
        let lower = name == "revuzhenko_lower" || params.get("sign").and_then(Value::as_str) == Some("lower");
        let sign = if lower { RevuzhenkoSign::Lower } else { RevuzhenkoSign::Upper };
        let region = region.unwrap_or_else(|| revuzhenko_box(sign));
        let checks = if eps != 0.0 {
            characteristic_residual_checks(name, &PerturbedChar::new(Revuzhenko::new(sign), eps), region, cfg.grid)
        } else {
            characteristic_residual_checks(name, f.as_ref(), region, cfg.grid)
        };
        return Ok(VerifyReport::new(checks));
    }
    if crate::velocity::VELOCITY_FIELDS.contains(&name) {
        let field = build_velocity(name, params)?;
        let field: Box<dyn VelocityField> =
            if eps != 0.0 { Box::new(crate::residuals::PerturbedVelocity::new(field, eps)) } else { field };
        let default = if name == "simple_wave_velocity" { Region::cartesian(-3.0, 3.0, -3.0, 3.0) } else { strip() };
        let analytic_threshold = if name == "theta4" { 1e-9f64.max(10.0 * THETA4_QUAD_TOL) } else { 1e-9 };
        let case = VelocityCase {
            label: name.into(),
            field,
            region: region.unwrap_or(default),
            margin: 1e-2,
            analytic_threshold,
        };
        return Ok(VerifyReport::new(velocity_residual_checks(&case, cfg.grid)));
    }
    let field = build(name, params)?;
    let region = region.unwrap_or_else(|| default_region(name));
    let margin = if name == "prandtl" { 5e-3 } else { 1e-2 };
    if eps != 0.0 {
        let bad = Perturbed::new(field, eps);
        return Ok(VerifyReport::new(stress_residual_checks(name, &bad, region, cfg.grid, margin)));
    }
    let mut checks = stress_residual_checks(name, field.as_ref(), region, cfg.grid, margin);
    {
        if let Ok(op) = operator_for(&field.subalgebra(), field.k(), field.frame()) {
            let n = (cfg.grid / 5).max(4);
            let label = format!("{name} invariant under {}", field.subalgebra().label());
            checks.push(match invariance_residual(&op, field.as_ref(), region, n, margin) {
                Ok(v) => Check::at_most("invariance", label, v, 1e-7),
                Err(e) => Check::failed("invariance", label, e),
            });
        }
    }
    Ok(VerifyReport::new(checks))
}
