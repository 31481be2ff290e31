use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::catalog::{Gradient, StressField};
use crate::characteristics::{simple_wave_envelopes, simple_wave_net, ClosedEnvelope, CurveNet, Family};
use crate::error::{Error, Result};
use crate::numeric::{bisect_newton, sign_change_brackets};
use crate::plane::{check_k, Frame, FunctionParam, FunctionSpec, Point2, StressState};
use crate::symmetry::SubalgebraTag;

const SCAN_INTERVALS: usize = 64;
const ROOT_TOL: f64 = 1e-12;

/// Where to look for the root `theta` of the implicit relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaBracket {
    Fixed { lo: f64, hi: f64 },
    /// `[phi + lo, phi + hi]` with `phi` the polar angle of the point.
    AroundPolarAngle { lo: f64, hi: f64 },
}

impl ThetaBracket {
    fn resolve(&self, x: f64, y: f64) -> (f64, f64) {
        match *self {
            ThetaBracket::Fixed { lo, hi } => (lo, hi),
            ThetaBracket::AroundPolarAngle { lo, hi } => {
                let phi = y.atan2(x);
                (phi + lo, phi + hi)
            }
        }
    }
}

/// Simple stress state with one family of straight slip lines.
///
/// Even `n`: `x cos theta + y sin theta = Phi(theta)`, `sigma = 2k theta + const`,
/// the straight lines belong to the second family.
/// Odd `n`: `x sin theta - y cos theta = Phi(theta)`, `sigma = -2k theta + const`,
/// the straight lines belong to the first family.
#[derive(Debug, Clone)]
pub struct SimpleWave {
    pub phi: FunctionParam,
    pub n: i32,
    pub sigma_const: f64,
    pub k: f64,
    pub bracket: ThetaBracket,
    name: String,
}

impl SimpleWave {
    pub fn new(phi: FunctionParam, n: i32, sigma_const: f64, k: f64, bracket: ThetaBracket) -> Result<Self> {
        check_k(k)?;
        let (lo, hi) = bracket.resolve(1.0, 0.0);
        if !(lo < hi) {
            return Err(Error::param("bracket", format!("lower end {lo} must be below upper end {hi}")));
        }
        Ok(SimpleWave { phi, n, sigma_const, k, bracket, name: "simple_wave".into() })
    }

    /// Centered fan through the origin, `Phi = 0`.
    pub fn fan(n: i32, k: f64) -> Result<Self> {
        let bracket = if n.rem_euclid(2) == 0 {
            ThetaBracket::AroundPolarAngle { lo: -3.0 * FRAC_PI_4, hi: -FRAC_PI_4 }
        } else {
            ThetaBracket::AroundPolarAngle { lo: -FRAC_PI_4, hi: FRAC_PI_4 }
        };
        let mut w = Self::new(FunctionParam::zero(), n, 0.0, k, bracket)?;
        w.name = "simple_wave_fan".into();
        Ok(w)
    }

    /// Spiral simple wave `r cos(theta - phi) = C e^theta`, `sigma = 2k theta + const`.
    pub fn spiral(c: f64, k: f64, sigma_const: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::param("C", format!("must be positive, got {c}")));
        }
        let bracket = ThetaBracket::AroundPolarAngle { lo: -FRAC_PI_4, hi: FRAC_PI_2 };
        let mut w = Self::new(FunctionParam::exp(c, 1.0), 0, sigma_const, k, bracket)?;
        w.name = "spiral_2".into();
        Ok(w)
    }

    pub fn is_even(&self) -> bool {
        self.n.rem_euclid(2) == 0
    }

    /// `(-1)^n`.
    pub fn parity(&self) -> f64 {
        if self.is_even() {
            1.0
        } else {
            -1.0
        }
    }

    /// The implicit relation `H(theta; x, y)` and `dH/dtheta`.
    pub fn h(&self, x: f64, y: f64, theta: f64) -> (f64, f64) {
        let (s, c) = theta.sin_cos();
        if self.is_even() {
            (
                x * c + y * s - self.phi.eval(theta),
                -x * s + y * c - self.phi.derivative(theta),
            )
        } else {
            (
                x * s - y * c - self.phi.eval(theta),
                x * c + y * s - self.phi.derivative(theta),
            )
        }
    }

    pub fn solve_theta(&self, x: f64, y: f64) -> Result<f64> {
        let (lo, hi) = self.bracket.resolve(x, y);
        let f = |t: f64| self.h(x, y, t).0;
        let brackets = sign_change_brackets(f, lo, hi, SCAN_INTERVALS);
        match brackets.len() {
            0 => Err(Error::NoRootInBracket { lo, hi }),
            1 => {
                let (a, b) = brackets[0];
                if a == b {
                    Ok(a)
                } else {
                    bisect_newton(f, a, b, ROOT_TOL)
                }
            }
            count => Err(Error::MultipleRoots { count, lo, hi }),
        }
    }
}

impl StressField for SimpleWave {
    fn name(&self) -> &str {
        &self.name
    }
    fn k(&self) -> f64 {
        self.k
    }
    fn frame(&self) -> Frame {
        Frame::Cartesian
    }
    fn params(&self) -> Vec<(String, f64)> {
        let mut p = vec![
            ("n".into(), self.n as f64),
            ("const".into(), self.sigma_const),
            ("k".into(), self.k),
        ];
        match self.phi.spec() {
            Some(FunctionSpec::Constant { value }) => p.push(("Phi".into(), *value)),
            Some(FunctionSpec::Exp { scale, rate }) => {
                p.push(("C".into(), *scale));
                p.push(("rate".into(), *rate));
            }
            _ => {}
        }
        p
    }
    fn subalgebra(&self) -> SubalgebraTag {
        let weight = self.parity() * 2.0 * self.k;
        match self.phi.spec() {
            Some(FunctionSpec::Zero) => SubalgebraTag::Theta5,
            Some(FunctionSpec::Constant { value }) if *value == 0.0 => SubalgebraTag::Theta5,
            Some(FunctionSpec::Constant { .. }) => SubalgebraTag::Theta4 { sign: 1, weight, alpha: 0.0 },
            Some(FunctionSpec::Exp { rate, .. }) => SubalgebraTag::Theta4 { sign: 1, weight, alpha: *rate },
            _ => SubalgebraTag::Unspecified,
        }
    }
    fn state(&self, p: &Point2) -> Result<StressState> {
        let [x, y] = p.xy();
        let theta = self.solve_theta(x, y)?;
        Ok(StressState {
            sigma: self.parity() * 2.0 * self.k * theta + self.sigma_const,
            theta,
            k: self.k,
        })
    }
    fn gradient(&self, p: &Point2) -> Result<Gradient> {
        let [x, y] = p.xy();
        let theta = self.solve_theta(x, y)?;
        let (_, h_t) = self.h(x, y, theta);
        if h_t == 0.0 {
            return Err(Error::domain(&self.name, "point lies on the envelope"));
        }
        let (s, c) = theta.sin_cos();
        let t = if self.is_even() { [-c / h_t, -s / h_t] } else { [-s / h_t, c / h_t] };
        let w = self.parity() * 2.0 * self.k;
        Ok(Gradient { sigma: [w * t[0], w * t[1]], theta: t })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        let [x, y] = p.xy();
        match self.solve_theta(x, y) {
            Ok(theta) => self.h(x, y, theta).1.abs(),
            Err(_) => 0.0,
        }
    }
    fn slip_net(&self, family: Family) -> Result<CurveNet> {
        simple_wave_net(self, family)
    }
    fn closed_envelopes(&self) -> Result<Vec<ClosedEnvelope>> {
        simple_wave_envelopes(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fan_through_origin() {
        let bracket = ThetaBracket::Fixed { lo: -FRAC_PI_2, hi: 0.0 };
        let w = SimpleWave::new(FunctionParam::zero(), 0, 0.0, 0.5, bracket).unwrap();
        let s = w.state(&Point2::cartesian(1.0, 1.0)).unwrap();
        assert!((s.theta + FRAC_PI_4).abs() < 1e-12);
        let fan = SimpleWave::fan(0, 0.5).unwrap();
        assert!((fan.state(&Point2::cartesian(1.0, 1.0)).unwrap().theta + FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn level_sets_are_lines() {
        let w = SimpleWave::new(
            FunctionParam::polynomial(vec![0.3, 0.2]),
            0,
            0.0,
            0.5,
            ThetaBracket::Fixed { lo: 0.0, hi: 1.2 },
        )
        .unwrap();
        let c1: f64 = 0.7;
        let (s, c) = c1.sin_cos();
        let rho = 0.3 + 0.2 * c1;
        for t in [-0.5, 0.0, 0.4] {
            let p = Point2::cartesian(rho * c - t * s, rho * s + t * c);
            assert!((w.state(&p).unwrap().theta - c1).abs() < 1e-11);
        }
    }

    #[test]
    fn spiral_relation() {
        let w = SimpleWave::spiral(1.0, 0.5, 0.0).unwrap();
        let p = Point2::polar(3.0, 0.4).unwrap();
        let s = w.state(&p).unwrap();
        assert!((3.0 * (s.theta - 0.4).cos() - s.theta.exp()).abs() < 1e-11);
        assert!((s.sigma - s.theta).abs() < 1e-15);
    }

    #[test]
    fn reports_multiple_roots() {
        let w = SimpleWave::new(
            FunctionParam::zero(),
            0,
            0.0,
            0.5,
            ThetaBracket::Fixed { lo: -3.0, hi: 3.0 },
        )
        .unwrap();
        assert!(matches!(w.state(&Point2::cartesian(1.0, 0.2)), Err(Error::MultipleRoots { .. })));
    }
}
