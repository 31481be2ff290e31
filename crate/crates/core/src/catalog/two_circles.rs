use crate::catalog::{check_positive, Gradient, StressField};
use crate::characteristics::{two_circles_envelopes, two_circles_net, ClosedEnvelope, CurveNet, Family};
use crate::error::{Error, Result};
use crate::numeric::adaptive_simpson;
use crate::plane::{check_k, Frame, Point2, StressState};
use crate::symmetry::SubalgebraTag;

const QUAD_TOL: f64 = 1e-13;

/// Plastic ring `a <= r <= b` between two rough circles.
///
/// `cos 2 theta_p = C1 / r^2 + C2`, `theta = theta_p + phi`,
/// `sigma = -2k C2 phi + f(r)` with `f' = 2k (cos 2g g' + sin 2g / r)`.
/// `f(a) = 0` fixes the free additive constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NadaiTwoCircles {
    pub a: f64,
    pub b: f64,
    pub k: f64,
}

impl NadaiTwoCircles {
    pub fn new(a: f64, b: f64, k: f64) -> Result<Self> {
        check_k(k)?;
        check_positive("a", a)?;
        if !(b > a) {
            return Err(Error::param("b", format!("outer radius must exceed a = {a}, got {b}")));
        }
        Ok(NadaiTwoCircles { a, b, k })
    }

    pub fn c1(&self) -> f64 {
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        -2.0 * a2 * b2 / (b2 - a2)
    }

    pub fn c2(&self) -> f64 {
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        (a2 + b2) / (b2 - a2)
    }

    /// Polar slip angle `g(r) = arccos(C1/r^2 + C2) / 2`, from `pi/2` at `r = a`
    /// down to `0` at `r = b`.
    pub fn g(&self, r: f64) -> f64 {
        0.5 * (self.c1() / (r * r) + self.c2()).clamp(-1.0, 1.0).acos()
    }

    fn sin2g(&self, r: f64) -> f64 {
        let w = (self.c1() / (r * r) + self.c2()).clamp(-1.0, 1.0);
        (1.0 - w * w).max(0.0).sqrt()
    }

    /// `f(r)`, the radial part of the mean stress.
    pub fn f(&self, r: f64) -> Result<f64> {
        let (a, b) = (self.a, self.b);
        // s = a + (b - a)(1 - cos t)/2 removes the square-root endpoint behaviour.
        let t_end = (1.0 - 2.0 * (r - a) / (b - a)).clamp(-1.0, 1.0).acos();
        let half = 0.5 * (b - a);
        let integral = adaptive_simpson(
            |t| {
                let s = a + half * (1.0 - t.cos());
                self.sin2g(s) / s * half * t.sin()
            },
            0.0,
            t_end,
            QUAD_TOL,
        )?;
        Ok(self.k * self.sin2g(r) + 2.0 * self.k * integral)
    }

    fn annulus(&self, p: &Point2) -> Result<[f64; 2]> {
        let [r, phi] = p.to_polar()?.coords();
        if r < self.a || r > self.b {
            return Err(Error::domain(
                "nadai_two_circles",
                format!("r = {r} outside [{}, {}]", self.a, self.b),
            ));
        }
        Ok([r, phi])
    }
}

impl StressField for NadaiTwoCircles {
    fn name(&self) -> &str {
        "nadai_two_circles"
    }
    fn k(&self) -> f64 {
        self.k
    }
    fn frame(&self) -> Frame {
        Frame::Polar
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("a".into(), self.a), ("b".into(), self.b), ("k".into(), self.k)]
    }
    fn subalgebra(&self) -> SubalgebraTag {
        SubalgebraTag::Theta4 { sign: -1, weight: 2.0 * self.k * self.c2(), alpha: 0.0 }
    }
    fn state(&self, p: &Point2) -> Result<StressState> {
        let [r, phi] = self.annulus(p)?;
        Ok(StressState {
            sigma: -2.0 * self.k * self.c2() * phi + self.f(r)?,
            theta: self.g(r) + phi,
            k: self.k,
        })
    }
    fn gradient(&self, p: &Point2) -> Result<Gradient> {
        let [r, _] = self.annulus(p)?;
        let g = self.g(r);
        let (s2, c2) = (2.0 * g).sin_cos();
        let dg = self.c1() / (r * r * r * s2);
        let k = self.k;
        Ok(Gradient {
            sigma: [2.0 * k * (c2 * dg + s2 / r), -2.0 * k * self.c2()],
            theta: [dg, 1.0],
        })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        p.to_polar()
            .map(|q| {
                let r = q.coords()[0];
                (r - self.a).min(self.b - r)
            })
            .unwrap_or(0.0)
    }
    fn slip_net(&self, family: Family) -> Result<CurveNet> {
        two_circles_net(self, family)
    }
    fn closed_envelopes(&self) -> Result<Vec<ClosedEnvelope>> {
        Ok(two_circles_envelopes(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn constants_and_boundaries() {
        let f = NadaiTwoCircles::new(1.0, 2f64.sqrt(), 0.5).unwrap();
        assert!((f.c1() + 4.0).abs() < 1e-14 && (f.c2() - 3.0).abs() < 1e-14);
        let r = 2.0 / 3f64.sqrt();
        assert!((f.g(r) - FRAC_PI_4).abs() < 1e-8);
        assert_eq!(f.f(1.0).unwrap(), 0.0);
    }

    #[test]
    fn f_matches_its_derivative() {
        let f = NadaiTwoCircles::new(1.0, 2.0, 0.5).unwrap();
        let (r0, r1) = (1.2, 1.7);
        let direct = f.f(r1).unwrap() - f.f(r0).unwrap();
        let via = crate::numeric::adaptive_simpson(
            |r| f.gradient(&Point2::polar(r, 0.0).unwrap()).unwrap().sigma[0],
            r0,
            r1,
            1e-12,
        )
        .unwrap();
        assert!((direct - via).abs() < 1e-10);
    }
}
