use std::f64::consts::FRAC_PI_2;

use crate::catalog::{Prandtl, SimpleWave, StressField};
use crate::error::{Error, Result};
use crate::numeric::adaptive_simpson;
use crate::plane::{FunctionParam, Point2};
use crate::velocity::{VelocityField, VelocityGradient};

const STRIP: Prandtl = Prandtl { c: 0.0, m: 1.0, h: 1.0, k: 0.5 };

fn strip_y(name: &str, p: &Point2) -> Result<[f64; 2]> {
    let [x, y] = p.xy();
    if !(y.abs() <= 1.0) {
        return Err(Error::domain(name, format!("|y| = {} exceeds 1", y.abs())));
    }
    Ok([x, y])
}

fn s_of(y: f64) -> f64 {
    (1.0 - y * y).max(0.0).sqrt()
}

fn strip_distance(p: &Point2) -> f64 {
    1.0 - p.xy()[1].abs()
}

/// `u = x - 2 sqrt(1 - y^2)`, `v = -y`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NadaiVelocity;

impl VelocityField for NadaiVelocity {
    fn name(&self) -> &str {
        "nadai"
    }
    fn params(&self) -> Vec<(String, f64)> {
        Vec::new()
    }
    fn background(&self) -> &dyn StressField {
        &STRIP
    }
    fn eval(&self, p: &Point2) -> Result<[f64; 2]> {
        let [x, y] = strip_y("nadai", p)?;
        Ok([x - 2.0 * s_of(y), -y])
    }
    fn gradient(&self, p: &Point2) -> Result<VelocityGradient> {
        let [_, y] = strip_y("nadai", p)?;
        Ok(VelocityGradient { u: [1.0, 2.0 * y / s_of(y)], v: [0.0, -1.0] })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        strip_distance(p)
    }
}

/// `u = x^2 - 3y^2 - 4x sqrt(1 - y^2) + C1`,
/// `v = 2y sqrt(1 - y^2) - 2 arccos y - 2xy + C2`.
#[derive(Debug, Clone, Copy)]
pub struct YakhnoVelocity {
    pub c1: f64,
    pub c2: f64,
}

impl VelocityField for YakhnoVelocity {
    fn name(&self) -> &str {
        "yakhno"
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("C1".into(), self.c1), ("C2".into(), self.c2)]
    }
    fn background(&self) -> &dyn StressField {
        &STRIP
    }
    fn eval(&self, p: &Point2) -> Result<[f64; 2]> {
        let [x, y] = strip_y("yakhno", p)?;
        let s = s_of(y);
        Ok([
            x * x - 3.0 * y * y - 4.0 * x * s + self.c1,
            2.0 * y * s - 2.0 * y.acos() - 2.0 * x * y + self.c2,
        ])
    }
    fn gradient(&self, p: &Point2) -> Result<VelocityGradient> {
        let [x, y] = strip_y("yakhno", p)?;
        let s = s_of(y);
        Ok(VelocityGradient {
            u: [2.0 * x - 4.0 * s, -6.0 * y + 4.0 * x * y / s],
            v: [-2.0 * y, 4.0 * s - 2.0 * x],
        })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        strip_distance(p)
    }
}

/// `u = xy + arcsin y - y sqrt(1 - y^2) + c1`, `v = -(x^2 + y^2)/2 + c2`.
#[derive(Debug, Clone, Copy)]
pub struct SenashovVelocity {
    pub c1: f64,
    pub c2: f64,
}

impl VelocityField for SenashovVelocity {
    fn name(&self) -> &str {
        "senashov"
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("c1".into(), self.c1), ("c2".into(), self.c2)]
    }
    fn background(&self) -> &dyn StressField {
        &STRIP
    }
    fn eval(&self, p: &Point2) -> Result<[f64; 2]> {
        let [x, y] = strip_y("senashov", p)?;
        let s = s_of(y);
        Ok([x * y + y.asin() - y * s + self.c1, -0.5 * (x * x + y * y) + self.c2])
    }
    fn gradient(&self, p: &Point2) -> Result<VelocityGradient> {
        let [x, y] = strip_y("senashov", p)?;
        let s = s_of(y);
        Ok(VelocityGradient { u: [y, x + 2.0 * y * y / s], v: [-x, -y] })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        strip_distance(p)
    }
}

/// Separable field `u = e^{-x/2} f(y)`, `v = e^{-x/2} g(y)` invariant under
/// x-translation combined with scaling.
///
/// Written without the removable `1/y` factors:
/// `u = E [w (c1 sgn y + c2 arcsin|y|) - c2 |y| / w]`,
/// `v = E [c1 |y| / w + c2 (w sgn y + y arcsin|y| / w)]`,
/// `E = exp((-x + s)/2)`, `s = sqrt(1 - y^2)`, `w = sqrt(1 + s)`, `sgn 0 = +1`.
/// The field is discontinuous across `y = 0` unless `c1 = c2 = 0`.
#[derive(Debug, Clone, Copy)]
pub struct Theta2Velocity {
    pub c1: f64,
    pub c2: f64,
}

impl Theta2Velocity {
    /// `(U, U', V, V')` on `y >= 0` as functions of `a = |y|`, with `c1` given.
    fn upper(&self, a: f64, c1: f64) -> [f64; 4] {
        let c2 = self.c2;
        let s = s_of(a);
        let w = (1.0 + s).sqrt();
        let asn = a.asin();
        let u = w * (c1 + c2 * asn) - c2 * a / w;
        let v = c1 * a / w + c2 * w + c2 * a * asn / w;
        // w' = -a / (2 s w) blows up at a = 1 together with arcsin'.
        let dw = -a / (2.0 * s * w);
        let du = dw * (c1 + c2 * asn) + w * c2 / s - c2 / w + c2 * a * dw / (w * w);
        let dv = c1 / w - c1 * a * dw / (w * w) + c2 * dw + c2 * (asn + a / s) / w - c2 * a * asn * dw / (w * w);
        [u, du, v, dv]
    }

    fn profile(&self, y: f64) -> [f64; 4] {
        if y >= 0.0 {
            self.upper(y, self.c1)
        } else {
            let [u, du, v, dv] = self.upper(-y, -self.c1);
            [u, -du, -v, dv]
        }
    }

    /// Dissipation of the field on the Prandtl strip.
    pub fn dissipation_closed_form(&self, x: f64, y: f64) -> f64 {
        let s = s_of(y);
        let e = (0.5 * (-x + s)).exp();
        -self.c2 * (s - 1.0 + y * y.asin()) / (2.0 * (1.0 - s).sqrt() * s) * e
    }
}

impl VelocityField for Theta2Velocity {
    fn name(&self) -> &str {
        "theta2"
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("c1".into(), self.c1), ("c2".into(), self.c2)]
    }
    fn background(&self) -> &dyn StressField {
        &STRIP
    }
    fn eval(&self, p: &Point2) -> Result<[f64; 2]> {
        let [x, y] = strip_y("theta2", p)?;
        let e = (0.5 * (-x + s_of(y))).exp();
        let [u, _, v, _] = self.profile(y);
        Ok([e * u, e * v])
    }
    fn gradient(&self, p: &Point2) -> Result<VelocityGradient> {
        let [x, y] = strip_y("theta2", p)?;
        let s = s_of(y);
        let e = (0.5 * (-x + s)).exp();
        let e_y = -e * y / (2.0 * s);
        let [u, du, v, dv] = self.profile(y);
        Ok(VelocityGradient {
            u: [-0.5 * e * u, e_y * u + e * du],
            v: [-0.5 * e * v, e_y * v + e * dv],
        })
    }
    /// Distance to the plates and to the jump line `y = 0`.
    fn boundary_distance(&self, p: &Point2) -> f64 {
        let y = p.xy()[1].abs();
        y.min(1.0 - y)
    }
}

/// Rotation-invariant field `u = rho sin psi`, `v = rho cos psi` with
/// `rho = c2 cosh^{1/2}(z + c1)`, `psi = arccos(tanh(z + c1))/2 - arcsin(y)/2`,
/// `z = x - sqrt(1 - y^2)`.
#[derive(Debug, Clone, Copy)]
pub struct Theta3Velocity {
    pub c1: f64,
    pub c2: f64,
}

impl VelocityField for Theta3Velocity {
    fn name(&self) -> &str {
        "theta3"
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("c1".into(), self.c1), ("c2".into(), self.c2)]
    }
    fn background(&self) -> &dyn StressField {
        &STRIP
    }
    fn eval(&self, p: &Point2) -> Result<[f64; 2]> {
        let [x, y] = strip_y("theta3", p)?;
        let z = x - s_of(y) + self.c1;
        let rho = self.c2 * z.cosh().sqrt();
        let psi = 0.5 * z.tanh().acos() - 0.5 * y.asin();
        Ok([rho * psi.sin(), rho * psi.cos()])
    }
    fn gradient(&self, p: &Point2) -> Result<VelocityGradient> {
        let [x, y] = strip_y("theta3", p)?;
        let s = s_of(y);
        let z = x - s + self.c1;
        let f = z.cosh().sqrt();
        let df = 0.5 * f * z.tanh();
        let dg = -0.5 / z.cosh();
        let psi = 0.5 * z.tanh().acos() - 0.5 * y.asin();
        let (sp, cp) = psi.sin_cos();
        let z_y = y / s;
        let psi_x = dg;
        let psi_y = dg * z_y - 0.5 / s;
        let c2 = self.c2;
        Ok(VelocityGradient {
            u: [c2 * (df * sp + f * cp * psi_x), c2 * (df * z_y * sp + f * cp * psi_y)],
            v: [c2 * (df * cp - f * sp * psi_x), c2 * (df * z_y * cp - f * sp * psi_y)],
        })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        strip_distance(p)
    }
}

/// Field invariant under x-translation combined with rotation:
/// `u = f sin psi`, `v = f cos psi`, `psi = -arcsin(y)/2 + g(z)`,
/// `z = x - sqrt(1 - y^2) - arcsin(y)/2`, `g = arctan(2 - sqrt 3 tanh(z/sqrt 3 + C))`,
/// `ln f = ln(amplitude) + (2/3) int_0^z cos 2g`, by quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Theta4Velocity {
    pub constant: f64,
    pub amplitude: f64,
}

/// Absolute tolerance of the `ln f` quadrature.
pub const THETA4_QUAD_TOL: f64 = 1e-13;

impl Theta4Velocity {
    fn g_terms(&self, z: f64) -> (f64, f64) {
        let arg = z / 3f64.sqrt() + self.constant;
        let t = 2.0 - 3f64.sqrt() * arg.tanh();
        let dt = -1.0 / (arg.cosh() * arg.cosh());
        (t.atan(), dt / (1.0 + t * t))
    }

    fn cos2g(&self, z: f64) -> f64 {
        let arg = z / 3f64.sqrt() + self.constant;
        let t = 2.0 - 3f64.sqrt() * arg.tanh();
        (1.0 - t * t) / (1.0 + t * t)
    }

    fn f(&self, z: f64) -> Result<f64> {
        let integral = adaptive_simpson(|t| self.cos2g(t), 0.0, z, THETA4_QUAD_TOL)?;
        Ok(self.amplitude * (2.0 / 3.0 * integral).exp())
    }

    fn locate(&self, p: &Point2) -> Result<(f64, f64, f64)> {
        let [x, y] = strip_y("theta4", p)?;
        let s = s_of(y);
        Ok((x - s - 0.5 * y.asin(), y, s))
    }
}

impl VelocityField for Theta4Velocity {
    fn name(&self) -> &str {
        "theta4"
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("const".into(), self.constant), ("amplitude".into(), self.amplitude)]
    }
    fn background(&self) -> &dyn StressField {
        &STRIP
    }
    fn eval(&self, p: &Point2) -> Result<[f64; 2]> {
        let (z, y, _) = self.locate(p)?;
        let f = self.f(z)?;
        let psi = -0.5 * y.asin() + self.g_terms(z).0;
        Ok([f * psi.sin(), f * psi.cos()])
    }
    fn gradient(&self, p: &Point2) -> Result<VelocityGradient> {
        let (z, y, s) = self.locate(p)?;
        let f = self.f(z)?;
        let df = 2.0 / 3.0 * self.cos2g(z) * f;
        let (g, dg) = self.g_terms(z);
        let psi = -0.5 * y.asin() + g;
        let (sp, cp) = psi.sin_cos();
        let z_y = (2.0 * y - 1.0) / (2.0 * s);
        let psi_x = dg;
        let psi_y = -0.5 / s + dg * z_y;
        Ok(VelocityGradient {
            u: [df * sp + f * cp * psi_x, df * z_y * sp + f * cp * psi_y],
            v: [df * cp - f * sp * psi_x, df * z_y * cp - f * sp * psi_y],
        })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        strip_distance(p)
    }
}

/// Velocity on a simple-wave background, decomposed along the slip directions:
/// `u = a cos theta - b sin theta`, `v = a sin theta + b cos theta`.
///
/// The component along the straight slip lines is a function of `theta` only
/// (`line`); the other one is `transverse(tau) +- int line dtheta`, where `tau`
/// is the arc coordinate along the straight line shifted by `int Phi dtheta`.
/// For even `n` the straight lines carry `b`; for odd `n` they carry `a`.
#[derive(Debug, Clone)]
pub struct SimpleWaveVelocity {
    background: SimpleWave,
    pub line: FunctionParam,
    pub transverse: FunctionParam,
}

impl SimpleWaveVelocity {
    pub fn new(background: SimpleWave, line: FunctionParam, transverse: FunctionParam) -> Self {
        SimpleWaveVelocity { background, line, transverse }
    }

    /// Returns `(a, b)` and their partials `[a_x, a_y]`, `[b_x, b_y]`, plus `theta`.
    fn components(&self, p: &Point2) -> Result<(f64, f64, [f64; 2], [f64; 2], f64, [f64; 2])> {
        let bg = &self.background;
        let [x, y] = p.xy();
        let theta = bg.solve_theta(x, y)?;
        let grad = bg.gradient(p)?;
        let t_x = grad.theta;
        let (s, c) = theta.sin_cos();
        let int_phi = bg.phi.integral(0.0, theta)?;
        let int_line = self.line.integral(0.0, theta)?;
        let l = self.line.eval(theta);
        let dl = self.line.derivative(theta);
        if bg.is_even() {
            let tau = -x * s + y * c + int_phi;
            let w = self.transverse.eval(tau);
            let dw = self.transverse.derivative(tau);
            let tau_x = [-s, c];
            let a = w + int_line;
            let a_d = [dw * tau_x[0] + l * t_x[0], dw * tau_x[1] + l * t_x[1]];
            let b_d = [dl * t_x[0], dl * t_x[1]];
            Ok((a, l, a_d, b_d, theta, t_x))
        } else {
            let tau = x * c + y * s + int_phi;
            let w = self.transverse.eval(tau);
            let dw = self.transverse.derivative(tau);
            let tau_x = [c, s];
            let b = w - int_line;
            let a_d = [dl * t_x[0], dl * t_x[1]];
            let b_d = [dw * tau_x[0] - l * t_x[0], dw * tau_x[1] - l * t_x[1]];
            Ok((l, b, a_d, b_d, theta, t_x))
        }
    }
}

impl VelocityField for SimpleWaveVelocity {
    fn name(&self) -> &str {
        "simple_wave_velocity"
    }
    fn params(&self) -> Vec<(String, f64)> {
        self.background.params()
    }
    fn background(&self) -> &dyn StressField {
        &self.background
    }
    fn eval(&self, p: &Point2) -> Result<[f64; 2]> {
        let (a, b, _, _, theta, _) = self.components(p)?;
        let (s, c) = theta.sin_cos();
        Ok([a * c - b * s, a * s + b * c])
    }
    fn gradient(&self, p: &Point2) -> Result<VelocityGradient> {
        let (a, b, a_d, b_d, theta, t_d) = self.components(p)?;
        let (s, c) = theta.sin_cos();
        let mut u = [0.0; 2];
        let mut v = [0.0; 2];
        for i in 0..2 {
            u[i] = a_d[i] * c - b_d[i] * s - (a * s + b * c) * t_d[i];
            v[i] = a_d[i] * s + b_d[i] * c + (a * c - b * s) * t_d[i];
        }
        Ok(VelocityGradient { u, v })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        self.background.boundary_distance(p)
    }
}

/// `u = y`, `v = -x`: compatible with every stress field.
#[derive(Debug)]
pub struct RigidRotation<F> {
    pub background: F,
}

impl<F: StressField> VelocityField for RigidRotation<F> {
    fn name(&self) -> &str {
        "rigid_rotation"
    }
    fn params(&self) -> Vec<(String, f64)> {
        Vec::new()
    }
    fn background(&self) -> &dyn StressField {
        &self.background
    }
    fn eval(&self, p: &Point2) -> Result<[f64; 2]> {
        let [x, y] = p.xy();
        Ok([y, -x])
    }
    fn gradient(&self, _p: &Point2) -> Result<VelocityGradient> {
        Ok(VelocityGradient { u: [0.0, 1.0], v: [-1.0, 0.0] })
    }
}

/// Constant velocity `(u0, v0)`.
#[derive(Debug)]
pub struct RigidTranslation<F> {
    pub background: F,
    pub u0: f64,
    pub v0: f64,
}

impl<F: StressField> VelocityField for RigidTranslation<F> {
    fn name(&self) -> &str {
        "rigid_translation"
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("u0".into(), self.u0), ("v0".into(), self.v0)]
    }
    fn background(&self) -> &dyn StressField {
        &self.background
    }
    fn eval(&self, _p: &Point2) -> Result<[f64; 2]> {
        Ok([self.u0, self.v0])
    }
    fn gradient(&self, _p: &Point2) -> Result<VelocityGradient> {
        Ok(VelocityGradient { u: [0.0; 2], v: [0.0; 2] })
    }
}

/// `a A + b B` for two fields on the same background.
#[derive(Debug)]
pub struct Superposition<A, B> {
    pub first: A,
    pub second: B,
    pub weights: [f64; 2],
}

impl<A: VelocityField, B: VelocityField> Superposition<A, B> {
    pub fn new(first: A, second: B, weights: [f64; 2]) -> Result<Self> {
        if first.background().name() != second.background().name()
            || first.background().params() != second.background().params()
        {
            return Err(Error::BackgroundMismatch(format!(
                "{} and {} live on different stress fields",
                first.name(),
                second.name()
            )));
        }
        Ok(Superposition { first, second, weights })
    }
}

impl<A: VelocityField, B: VelocityField> VelocityField for Superposition<A, B> {
    fn name(&self) -> &str {
        "superposition"
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("a".into(), self.weights[0]), ("b".into(), self.weights[1])]
    }
    fn background(&self) -> &dyn StressField {
        self.first.background()
    }
    fn eval(&self, p: &Point2) -> Result<[f64; 2]> {
        let (a, b) = (self.first.eval(p)?, self.second.eval(p)?);
        let [wa, wb] = self.weights;
        Ok([wa * a[0] + wb * b[0], wa * a[1] + wb * b[1]])
    }
    fn gradient(&self, p: &Point2) -> Result<VelocityGradient> {
        let (a, b) = (self.first.gradient(p)?, self.second.gradient(p)?);
        let [wa, wb] = self.weights;
        let mix = |x: [f64; 2], y: [f64; 2]| [wa * x[0] + wb * y[0], wa * x[1] + wb * y[1]];
        Ok(VelocityGradient { u: mix(a.u, b.u), v: mix(a.v, b.v) })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        self.first.boundary_distance(p).min(self.second.boundary_distance(p))
    }
}

/// Boundary values on the plates for the separable field with `c1 = 0`:
/// `u(x, +-1) = c2 (pi/2 - 1) e^{-x/2}`, `v(x, +-1) = +-c2 (1 + pi/2) e^{-x/2}`.
pub fn theta2_plate_values(c2: f64, x: f64, upper: bool) -> [f64; 2] {
    let e = (-0.5 * x).exp();
    let sign = if upper { 1.0 } else { -1.0 };
    [c2 * (FRAC_PI_2 - 1.0) * e, sign * c2 * (1.0 + FRAC_PI_2) * e]
}
