//! Velocity fields compatible with a stress field, plastic dissipation and
//! streamlines.

mod fields;

use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::{SimpleWave, StressField};
use crate::error::{Error, Result};
use crate::numeric::{default_step, fd_partial_vec, rk4_step};
use crate::plane::{levy_to_components, FullStress, FunctionParam, FunctionSpec, Point2};
use crate::residuals::DerivativeMode;

pub use fields::{
    theta2_plate_values, NadaiVelocity, RigidRotation, RigidTranslation, SenashovVelocity, SimpleWaveVelocity,
    Superposition, Theta2Velocity, Theta3Velocity, Theta4Velocity, YakhnoVelocity, THETA4_QUAD_TOL,
};

/// `u = [u_x, u_y]`, `v = [v_x, v_y]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityGradient {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

pub trait VelocityField: Send + Sync + Debug {
    fn name(&self) -> &str;
    fn params(&self) -> Vec<(String, f64)>;
    /// The stress field this velocity was constructed for.
    fn background(&self) -> &dyn StressField;
    fn eval(&self, p: &Point2) -> Result<[f64; 2]>;
    fn gradient(&self, p: &Point2) -> Result<VelocityGradient>;
    fn boundary_distance(&self, p: &Point2) -> f64 {
        self.background().boundary_distance(p)
    }
}

impl VelocityField for Box<dyn VelocityField> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn params(&self) -> Vec<(String, f64)> {
        (**self).params()
    }
    fn background(&self) -> &dyn StressField {
        (**self).background()
    }
    fn eval(&self, p: &Point2) -> Result<[f64; 2]> {
        (**self).eval(p)
    }
    fn gradient(&self, p: &Point2) -> Result<VelocityGradient> {
        (**self).gradient(p)
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        (**self).boundary_distance(p)
    }
}

/// Velocity partials, analytic or by Richardson central differences.
pub fn velocity_partials(vf: &dyn VelocityField, p: &Point2, mode: DerivativeMode) -> Result<VelocityGradient> {
    match mode {
        DerivativeMode::Analytic => vf.gradient(p),
        DerivativeMode::FiniteDifference => {
            let [x, y] = p.xy();
            vf.eval(p)?;
            let failed = std::cell::RefCell::new(None);
            let f = |q: &[f64; 2]| match vf.eval(&Point2::cartesian(q[0], q[1])) {
                Ok(v) => v,
                Err(e) => {
                    failed.borrow_mut().get_or_insert(e);
                    [f64::NAN; 2]
                }
            };
            let dx = fd_partial_vec(f, &[x, y], 0, default_step(x));
            let dy = fd_partial_vec(f, &[x, y], 1, default_step(y));
            if let Some(e) = failed.into_inner() {
                return Err(e);
            }
            Ok(VelocityGradient { u: [dx[0], dy[0]], v: [dx[1], dy[1]] })
        }
    }
}

fn check_background(vf: &dyn VelocityField, bg: &dyn StressField) -> Result<()> {
    let own = vf.background();
    if own.name() != bg.name() || own.params() != bg.params() {
        return Err(Error::BackgroundMismatch(format!(
            "{} was built for {} but checked against {}",
            vf.name(),
            own.name(),
            bg.name()
        )));
    }
    Ok(())
}

/// Residuals of the velocity system against the slip angle of `bg`:
/// `r1 = (u_y + v_x) sin 2theta + (u_x - v_y) cos 2theta`, `r2 = u_x + v_y`.
pub fn velocity_residual(
    vf: &dyn VelocityField,
    bg: &dyn StressField,
    p: &Point2,
    mode: DerivativeMode,
) -> Result<[f64; 2]> {
    let theta = bg.state(p)?.theta;
    let g = velocity_partials(vf, p, mode)?;
    let (s2, c2) = (2.0 * theta).sin_cos();
    Ok([(g.u[1] + g.v[0]) * s2 + (g.u[0] - g.v[1]) * c2, g.u[0] + g.v[1]])
}

/// Strain rates with the tensorial shear `gamma_xy = (u_y + v_x)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrainRates {
    pub e_x: f64,
    pub e_y: f64,
    pub gamma_xy: f64,
}

impl StrainRates {
    pub fn from_gradient(g: &VelocityGradient) -> Self {
        StrainRates { e_x: g.u[0], e_y: g.v[1], gamma_xy: 0.5 * (g.u[1] + g.v[0]) }
    }
}

/// `D = sigma_x e_x + sigma_y e_y + 2 tau_xy gamma_xy`.
pub fn dissipation(fs: &FullStress, sr: &StrainRates) -> f64 {
    fs.sigma_x * sr.e_x + fs.sigma_y * sr.e_y + 2.0 * fs.tau_xy * sr.gamma_xy
}

/// Dissipation of `vf` at `p` with analytic velocity partials.
pub fn dissipation_at(vf: &dyn VelocityField, p: &Point2) -> Result<f64> {
    let s = vf.background().state(p)?;
    let g = vf.gradient(p)?;
    Ok(dissipation(&levy_to_components(&s), &StrainRates::from_gradient(&g)))
}

/// The flow-rule multiplier `lambda` with `u_x - v_y = lambda (sigma_x - sigma_y)` and
/// `v_x + u_y = 2 lambda tau_xy`, taken as the least-squares combination
/// `[(u_x - v_y)(sigma_x - sigma_y) + 2 tau (v_x + u_y)] / 4k^2`.
pub fn flow_multiplier(vf: &dyn VelocityField, p: &Point2) -> Result<f64> {
    let bg = vf.background();
    let s = bg.state(p)?;
    let fs = levy_to_components(&s);
    let g = vf.gradient(p)?;
    let d = fs.sigma_x - fs.sigma_y;
    let scale = 4.0 * s.k * s.k;
    if d.abs() < 1e-300 && fs.tau_xy.abs() < 1e-300 {
        return Err(Error::IndeterminateAtStressIsotropy);
    }
    Ok(((g.u[0] - g.v[1]) * d + 2.0 * fs.tau_xy * (g.v[0] + g.u[1])) / scale)
}

/// True iff the dissipation inequality holds: the common ratio
/// `(u_x - v_y)/(sigma_x - sigma_y) = (v_x + u_y)/(2 tau_xy)` is non-negative.
pub fn dissipation_sign_ok(vf: &dyn VelocityField, bg: &dyn StressField, p: &Point2) -> Result<bool> {
    check_background(vf, bg)?;
    let lambda = flow_multiplier(vf, p)?;
    let g = vf.gradient(p)?;
    let scale = g.u.iter().chain(g.v.iter()).fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    Ok(lambda >= -1e-12 * scale)
}

/// One vertex of a streamline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StreamVertex {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
    pub dissipation: f64,
    pub diss_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Streamline {
    pub vertices: Vec<StreamVertex>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamOptions {
    pub step: f64,
    pub max_arclen: f64,
    /// Stop when `boundary_distance` drops below this.
    pub margin: f64,
    /// Integrate against the flow.
    pub backward: bool,
}

impl Default for StreamOptions {
    fn default() -> Self {
        StreamOptions { step: 1e-3, max_arclen: 1.0, margin: 1e-2, backward: false }
    }
}

const STAGNATION: f64 = 1e-12;

/// RK4 integration of the unit velocity direction (arc-length parameter).
pub fn trace_streamline(vf: &dyn VelocityField, start: &Point2, opts: &StreamOptions) -> Result<Streamline> {
    let start = start.to_cartesian();
    let uv = vf.eval(&start).map_err(|_| Error::StartOutsideDomain)?;
    let speed = uv[0].hypot(uv[1]);
    if speed < STAGNATION {
        return Err(Error::StagnationPoint(speed));
    }
    let sign = if opts.backward { -1.0 } else { 1.0 };
    let direction = |q: &[f64; 2]| -> Option<[f64; 2]> {
        let p = Point2::cartesian(q[0], q[1]);
        let uv = vf.eval(&p).ok()?;
        let n = uv[0].hypot(uv[1]);
        if n < STAGNATION || vf.boundary_distance(&p) < 0.5 * opts.margin {
            return None;
        }
        Some([sign * uv[0] / n, sign * uv[1] / n])
    };
    let vertex = |s: f64, q: [f64; 2]| -> Result<StreamVertex> {
        let p = Point2::cartesian(q[0], q[1]);
        let [u, v] = vf.eval(&p)?;
        let (d, ok) = match (dissipation_at(vf, &p), flow_multiplier(vf, &p)) {
            (Ok(d), Ok(l)) => (d, l >= 0.0),
            _ => (f64::NAN, false),
        };
        Ok(StreamVertex { s, x: q[0], y: q[1], u, v, dissipation: d, diss_ok: ok })
    };
    let mut y = start.coords();
    let mut s = 0.0;
    let mut out = vec![vertex(0.0, y)?];
    while s + opts.step <= opts.max_arclen + 1e-12 {
        let Some(next) = rk4_step(direction, &y, opts.step) else { break };
        if vf.boundary_distance(&Point2::cartesian(next[0], next[1])) < opts.margin {
            break;
        }
        y = next;
        s += opts.step;
        out.push(vertex(s, y)?);
    }
    Ok(Streamline { vertices: out })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoConsts {
    #[serde(alias = "C1", default)]
    c1: f64,
    #[serde(alias = "C2", default)]
    c2: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Theta4Params {
    #[serde(rename = "const", default)]
    constant: f64,
    #[serde(default = "unit")]
    amplitude: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimpleWaveVelocityParams {
    #[serde(default = "unit")]
    #[serde(rename = "C")]
    c: f64,
    #[serde(default = "zero_spec")]
    line: FunctionSpec,
    #[serde(default = "zero_spec")]
    transverse: FunctionSpec,
}

fn zero_spec() -> FunctionSpec {
    FunctionSpec::Zero
}

/// Names accepted by [`build_velocity`].
pub const VELOCITY_FIELDS: &[&str] =
    &["nadai", "yakhno", "senashov", "theta2", "theta3", "theta4", "simple_wave_velocity"];

fn parse<T: serde::de::DeserializeOwned>(params: &Value) -> Result<T> {
    let v = if params.is_null() { Value::Object(Default::default()) } else { params.clone() };
    serde_json::from_value(v).map_err(|e| Error::param("params", e.to_string()))
}

/// Builds a catalog velocity field by name. `simple_wave_velocity` lives on the
/// spiral simple wave `r cos(theta - phi) = C e^theta`.
pub fn build_velocity(name: &str, params: &Value) -> Result<Box<dyn VelocityField>> {
    Ok(match name {
        "nadai" => {
            if params.as_object().is_some_and(|m| !m.is_empty()) {
                return Err(Error::param("params", "nadai takes no parameters"));
            }
            Box::new(NadaiVelocity)
        }
        "yakhno" => {
            let p: TwoConsts = parse(params)?;
            Box::new(YakhnoVelocity { c1: p.c1, c2: p.c2 })
        }
        "senashov" => {
            let p: TwoConsts = parse(params)?;
            Box::new(SenashovVelocity { c1: p.c1, c2: p.c2 })
        }
        "theta2" => {
            let p: TwoConsts = parse(params)?;
            Box::new(Theta2Velocity { c1: p.c1, c2: p.c2 })
        }
        "theta3" => {
            let p: TwoConsts = parse(params)?;
            Box::new(Theta3Velocity { c1: p.c1, c2: p.c2 })
        }
        "theta4" => {
            let p: Theta4Params = parse(params)?;
            Box::new(Theta4Velocity { constant: p.constant, amplitude: p.amplitude })
        }
        "simple_wave_velocity" => {
            let p: SimpleWaveVelocityParams = parse(params)?;
            Box::new(SimpleWaveVelocity::new(
                SimpleWave::spiral(p.c, 0.5, 0.0)?,
                FunctionParam::from_spec(&p.line),
                FunctionParam::from_spec(&p.transverse),
            ))
        }
        other => return Err(Error::UnknownSolution(other.to_string())),
    })
}
