use crate::catalog::{check_positive, Gradient, StressField};
use crate::characteristics::{prandtl_net, CurveNet, Family};
use crate::error::{Error, Result};
use crate::plane::{check_k, Frame, Point2, StressState};
use crate::symmetry::SubalgebraTag;

/// Plastic layer compressed between rough parallel plates `y = +-h`.
///
/// `sigma = k(-c - m x / h + sqrt(1 - m^2 y^2 / h^2))`,
/// `theta = -arccos(m y / h) / 2`, the branch in `[-pi/2, 0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prandtl {
    pub c: f64,
    pub m: f64,
    pub h: f64,
    pub k: f64,
}

impl Default for Prandtl {
    fn default() -> Self {
        Prandtl { c: 0.0, m: 1.0, h: 1.0, k: 0.5 }
    }
}

impl Prandtl {
    pub fn new(c: f64, m: f64, h: f64, k: f64) -> Result<Self> {
        check_k(k)?;
        check_positive("h", h)?;
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::param("m", format!("friction factor must lie in [0, 1], got {m}")));
        }
        Ok(Prandtl { c, m, h, k })
    }

    fn xy(&self, p: &Point2) -> Result<[f64; 2]> {
        let [x, y] = p.xy();
        if !(y.abs() <= self.h) {
            return Err(Error::domain("prandtl", format!("|y| = {} exceeds h = {}", y.abs(), self.h)));
        }
        Ok([x, y])
    }

    fn s(&self, y: f64) -> f64 {
        let q = self.m * y / self.h;
        (1.0 - q * q).max(0.0).sqrt()
    }

    /// Hodograph of the default layer: `x = -2 sigma - sin 2 theta`,
    /// `y = cos 2 theta` (valid for `c = 0`, `m = h = 1`, `2k = 1`).
    pub fn hodograph(sigma: f64, theta: f64) -> [f64; 2] {
        [-2.0 * sigma - (2.0 * theta).sin(), (2.0 * theta).cos()]
    }
}

impl StressField for Prandtl {
    fn name(&self) -> &str {
        "prandtl"
    }
    fn k(&self) -> f64 {
        self.k
    }
    fn frame(&self) -> Frame {
        Frame::Cartesian
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![
            ("c".into(), self.c),
            ("m".into(), self.m),
            ("h".into(), self.h),
            ("k".into(), self.k),
        ]
    }
    fn subalgebra(&self) -> SubalgebraTag {
        if self.m > 0.0 {
            SubalgebraTag::Translation {
                sigma_coeff: 1.0,
                x_coeff: -self.h / (self.k * self.m),
                y_coeff: 0.0,
            }
        } else {
            SubalgebraTag::Translation { sigma_coeff: 0.0, x_coeff: 1.0, y_coeff: 0.0 }
        }
    }
    fn state(&self, p: &Point2) -> Result<StressState> {
        let [x, y] = self.xy(p)?;
        let q = (self.m * y / self.h).clamp(-1.0, 1.0);
        Ok(StressState {
            sigma: self.k * (-self.c - self.m * x / self.h + self.s(y)),
            theta: -0.5 * q.acos(),
            k: self.k,
        })
    }
    fn gradient(&self, p: &Point2) -> Result<Gradient> {
        let [_, y] = self.xy(p)?;
        let s = self.s(y);
        let (m, h, k) = (self.m, self.h, self.k);
        Ok(Gradient {
            sigma: [-k * m / h, -k * m * m * y / (h * h * s)],
            theta: [0.0, 0.5 * m / (h * s)],
        })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        if self.m == 0.0 {
            return f64::INFINITY;
        }
        (self.h / self.m - p.xy()[1].abs()).max(0.0)
    }
    fn slip_net(&self, family: Family) -> Result<CurveNet> {
        prandtl_net(self, family)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn reference_values() {
        let f = Prandtl::default();
        let s = f.state(&Point2::cartesian(0.0, 0.0)).unwrap();
        assert!((s.sigma - 0.5).abs() < 1e-15 && (s.theta + FRAC_PI_4).abs() < 1e-15);
        let s = f.state(&Point2::cartesian(1.0, 1.0)).unwrap();
        assert!((s.sigma + 0.5).abs() < 1e-15 && s.theta.abs() < 1e-15);
        assert_eq!(s.components().tau_xy, 0.5);
        let s = f.state(&Point2::cartesian(0.0, -1.0)).unwrap();
        assert_eq!(s.components().tau_xy, -0.5);
        assert!(f.state(&Point2::cartesian(0.0, 1.5)).is_err());
    }

    #[test]
    fn general_components() {
        let f = Prandtl::new(0.3, 0.7, 2.0, 1.3).unwrap();
        let (x, y) = (0.4, -1.1);
        let c = f.state(&Point2::cartesian(x, y)).unwrap().components();
        let s = (1.0 - (0.7 * y / 2.0f64).powi(2)).sqrt();
        assert!((c.sigma_x / 1.3 - (-0.3 - 0.7 * x / 2.0 + 2.0 * s)).abs() < 1e-14);
        assert!((c.sigma_y / 1.3 - (-0.3 - 0.7 * x / 2.0)).abs() < 1e-14);
        assert!((c.tau_xy - 1.3 * 0.7 * y / 2.0).abs() < 1e-14);
    }
}
