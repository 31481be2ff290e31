//! Coordinates, the Lévy parameterization of a yielded plane stress state,
//! and function-valued parameters.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Cartesian,
    Polar,
}

/// A point in the plane, tagged with the frame its coordinates live in.
///
/// Polar points keep the angle they were built with; no reduction to
/// `(-pi, pi]` happens, so fields living on several sheets (spirals) can be
/// evaluated continuously.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    coords: [f64; 2],
    frame: Frame,
}

impl Point2 {
    pub fn cartesian(x: f64, y: f64) -> Self {
        Point2 {
            coords: [x, y],
            frame: Frame::Cartesian,
        }
    }

    pub fn polar(r: f64, phi: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        Ok(Point2 {
            coords: [r, phi],
            frame: Frame::Polar,
        })
    }

    /// Builds a point from native coordinates of `frame`.
    pub fn new(frame: Frame, a: f64, b: f64) -> Result<Self> {
        match frame {
            Frame::Cartesian => Ok(Self::cartesian(a, b)),
            Frame::Polar => Self::polar(a, b),
        }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn coords(&self) -> [f64; 2] {
        self.coords
    }

    /// Cartesian coordinates `(x, y)` regardless of the stored frame.
    pub fn xy(&self) -> [f64; 2] {
        match self.frame {
            Frame::Cartesian => self.coords,
            Frame::Polar => {
                let [r, phi] = self.coords;
                [r * phi.cos(), r * phi.sin()]
            }
        }
    }

    pub fn to_cartesian(&self) -> Point2 {
        let [x, y] = self.xy();
        Point2::cartesian(x, y)
    }

    /// Polar form; cartesian input gets the principal angle from `atan2`.
    pub fn to_polar(&self) -> Result<Point2> {
        match self.frame {
            Frame::Polar => Ok(*self),
            Frame::Cartesian => {
                let [x, y] = self.coords;
                Point2::polar(x.hypot(y), y.atan2(x))
            }
        }
    }

    pub fn in_frame(&self, frame: Frame) -> Result<Point2> {
        match frame {
            Frame::Cartesian => Ok(self.to_cartesian()),
            Frame::Polar => self.to_polar(),
        }
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.coords;
        match self.frame {
            Frame::Cartesian => write!(f, "(x={a}, y={b})"),
            Frame::Polar => write!(f, "(r={a}, phi={b})"),
        }
    }
}

/// Mean stress `sigma`, slip angle `theta` (cartesian convention) and the
/// yield constant `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressState {
    pub sigma: f64,
    pub theta: f64,
    pub k: f64,
}

impl StressState {
    pub fn new(sigma: f64, theta: f64, k: f64) -> Result<Self> {
        check_k(k)?;
        Ok(StressState { sigma, theta, k })
    }

    pub fn components(&self) -> FullStress {
        levy_to_components(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullStress {
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub tau_xy: f64,
}

impl FullStress {
    /// `(sx - sy)^2 + 4 t^2 - 4 k^2`, signed.
    pub fn yield_residual(&self, k: f64) -> f64 {
        let d = self.sigma_x - self.sigma_y;
        d * d + 4.0 * self.tau_xy * self.tau_xy - 4.0 * k * k
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.sigma_x + self.sigma_y)
    }
}

pub(crate) fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidK(k))
    }
}

pub fn levy_to_components(s: &StressState) -> FullStress {
    let (sin2, cos2) = (2.0 * s.theta).sin_cos();
    FullStress {
        sigma_x: s.sigma - s.k * sin2,
        sigma_y: s.sigma + s.k * sin2,
        tau_xy: s.k * cos2,
    }
}

/// How to pick `theta` when inverting the Lévy map; `2 theta` is only known
/// modulo `2 pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleBranch {
    /// `2 theta` in `(-pi, pi]`.
    Principal,
    /// The representative with `2 theta` nearest to `2 theta0`.
    Near(f64),
}

pub const DEFAULT_YIELD_TOL: f64 = 1e-8;

pub fn components_to_levy(
    f: &FullStress,
    k: f64,
    branch: AngleBranch,
    tol: f64,
) -> Result<StressState> {
    check_k(k)?;
    let residual = f.yield_residual(k);
    if !(residual.abs() <= tol * k * k) {
        return Err(Error::YieldViolation {
            residual: residual.abs(),
            tol,
        });
    }
    let two_theta = ((f.sigma_y - f.sigma_x) / (2.0 * k)).atan2(f.tau_xy / k);
    let two_theta = match branch {
        AngleBranch::Principal => two_theta,
        AngleBranch::Near(theta0) => {
            let target = 2.0 * theta0;
            two_theta + 2.0 * PI * ((target - two_theta) / (2.0 * PI)).round()
        }
    };
    Ok(StressState {
        sigma: f.mean(),
        theta: 0.5 * two_theta,
        k,
    })
}

pub fn theta_cart_from_polar(theta_p: f64, phi: f64) -> f64 {
    theta_p + phi
}

pub fn theta_polar_from_cart(theta_c: f64, phi: f64) -> f64 {
    theta_c - phi
}

/// Closed description of a function parameter, used when parameters arrive
/// as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Zero,
    Constant { value: f64 },
    /// `scale * exp(rate * t)`
    Exp { scale: f64, rate: f64 },
    /// `c[0] + c[1] t + c[2] t^2 + ...`
    Polynomial { coeffs: Vec<f64> },
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of one real variable with an optional analytic derivative.
#[derive(Clone)]
pub struct FunctionParam {
    label: String,
    spec: Option<FunctionSpec>,
    f: ScalarFn,
    df: Option<ScalarFn>,
    antiderivative: Option<ScalarFn>,
}

impl fmt::Debug for FunctionParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionParam")
            .field("label", &self.label)
            .field("spec", &self.spec)
            .field("analytic_derivative", &self.df.is_some())
            .finish()
    }
}

impl FunctionParam {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        FunctionParam {
            label: label.into(),
            spec: None,
            f: Arc::new(f),
            df: None,
            antiderivative: None,
        }
    }

    pub fn with_derivative(mut self, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.df = Some(Arc::new(df));
        self
    }

    pub fn with_antiderivative(mut self, big_f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.antiderivative = Some(Arc::new(big_f));
        self
    }

    pub fn from_spec(spec: &FunctionSpec) -> Self {
        let mut p = match spec.clone() {
            FunctionSpec::Zero => FunctionParam::new("0", |_| 0.0)
                .with_derivative(|_| 0.0)
                .with_antiderivative(|_| 0.0),
            FunctionSpec::Constant { value } => FunctionParam::new(format!("{value}"), move |_| value)
                .with_derivative(|_| 0.0)
                .with_antiderivative(move |t| value * t),
            FunctionSpec::Exp { scale, rate } => {
                let mut p = FunctionParam::new(format!("{scale}*exp({rate}t)"), move |t| {
                    scale * (rate * t).exp()
                })
                .with_derivative(move |t| scale * rate * (rate * t).exp());
                if rate != 0.0 {
                    p = p.with_antiderivative(move |t| scale * (rate * t).exp() / rate);
                } else {
                    p = p.with_antiderivative(move |t| scale * t);
                }
                p
            }
            FunctionSpec::Polynomial { coeffs } => {
                let c0 = coeffs.clone();
                let c1 = coeffs.clone();
                let c2 = coeffs;
                FunctionParam::new("polynomial", move |t| horner(&c0, t))
                    .with_derivative(move |t| {
                        let d: Vec<f64> = c1.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
                        horner(&d, t)
                    })
                    .with_antiderivative(move |t| {
                        let mut acc = 0.0;
                        for (i, c) in c2.iter().enumerate().rev() {
                            acc = acc * t + c / (i as f64 + 1.0);
                        }
                        acc * t
                    })
            }
        };
        p.spec = Some(spec.clone());
        p
    }

    pub fn zero() -> Self {
        Self::from_spec(&FunctionSpec::Zero)
    }

    pub fn constant(value: f64) -> Self {
        Self::from_spec(&FunctionSpec::Constant { value })
    }

    pub fn exp(scale: f64, rate: f64) -> Self {
        Self::from_spec(&FunctionSpec::Exp { scale, rate })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self::from_spec(&FunctionSpec::Polynomial { coeffs })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spec(&self) -> Option<&FunctionSpec> {
        self.spec.as_ref()
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.df.is_some()
    }

    /// Analytic derivative when supplied, Richardson central difference otherwise.
    pub fn derivative(&self, t: f64) -> f64 {
        match &self.df {
            Some(df) => df(t),
            None => self.fd_derivative(t),
        }
    }

    pub fn fd_derivative(&self, t: f64) -> f64 {
        numeric::derivative(|s| (self.f)(s), t, numeric::default_step(t))
    }

    /// `int_{t0}^{t1} f`, analytic when an antiderivative is known.
    pub fn integral(&self, t0: f64, t1: f64) -> Result<f64> {
        match &self.antiderivative {
            Some(big_f) => Ok(big_f(t1) - big_f(t0)),
            None => numeric::adaptive_simpson(|s| (self.f)(s), t0, t1, 1e-12),
        }
    }

    /// Largest relative mismatch between the analytic derivative and finite
    /// differences over `probes`; `None` if no analytic derivative exists.
    pub fn derivative_mismatch(&self, probes: &[f64]) -> Option<f64> {
        let df = self.df.as_ref()?;
        let worst = probes
            .iter()
            .map(|&t| {
                let a = df(t);
                let n = self.fd_derivative(t);
                (a - n).abs() / a.abs().max(1.0)
            })
            .fold(0.0, f64::max);
        Some(worst)
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci)
}
