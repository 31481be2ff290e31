use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::catalog::{check_positive, Gradient, StressField};
use crate::error::{Error, Result};
use crate::plane::{check_k, Frame, Point2, StressState};
use crate::symmetry::SubalgebraTag;

fn polar_outside(name: &str, radius: f64, p: &Point2) -> Result<[f64; 2]> {
    let [r, phi] = p.to_polar()?.coords();
    if r < radius {
        return Err(Error::domain(name, format!("r = {r} is inside r = {radius}")));
    }
    Ok([r, phi])
}

/// Plastic zone around a pressurized circular cavity of radius `R`:
/// `theta = phi + pi/4`, `sigma = 2k ln(r/R) + k - p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NadaiCavity {
    pub radius: f64,
    pub pressure: f64,
    pub k: f64,
}

impl NadaiCavity {
    pub fn new(radius: f64, pressure: f64, k: f64) -> Result<Self> {
        check_k(k)?;
        check_positive("R", radius)?;
        Ok(NadaiCavity { radius, pressure, k })
    }
}

impl StressField for NadaiCavity {
    fn name(&self) -> &str {
        "nadai_cavity"
    }
    fn k(&self) -> f64 {
        self.k
    }
    fn frame(&self) -> Frame {
        Frame::Polar
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("R".into(), self.radius), ("p".into(), self.pressure), ("k".into(), self.k)]
    }
    fn subalgebra(&self) -> SubalgebraTag {
        SubalgebraTag::Theta2 { alpha: 1.0 / (2.0 * self.k) }
    }
    fn state(&self, p: &Point2) -> Result<StressState> {
        let [r, phi] = polar_outside("nadai_cavity", self.radius, p)?;
        Ok(StressState {
            sigma: 2.0 * self.k * (r / self.radius).ln() + self.k - self.pressure,
            theta: phi + FRAC_PI_4,
            k: self.k,
        })
    }
    fn gradient(&self, p: &Point2) -> Result<Gradient> {
        let [r, _] = polar_outside("nadai_cavity", self.radius, p)?;
        Ok(Gradient { sigma: [2.0 * self.k / r, 0.0], theta: [0.0, 1.0] })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        p.to_polar().map(|q| q.coords()[0] - self.radius).unwrap_or(0.0)
    }
}

/// Vortex flow around a rotating rough disc of radius `R`:
/// `sigma = -k ln tan(arccos(R^2/r^2)/2 + pi/4) - p`,
/// `theta = phi - pi/2 + arccos(R^2/r^2)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NadaiVortex {
    pub radius: f64,
    pub pressure: f64,
    pub k: f64,
}

impl NadaiVortex {
    pub fn new(radius: f64, pressure: f64, k: f64) -> Result<Self> {
        check_k(k)?;
        check_positive("R", radius)?;
        Ok(NadaiVortex { radius, pressure, k })
    }
}

impl StressField for NadaiVortex {
    fn name(&self) -> &str {
        "nadai_vortex"
    }
    fn k(&self) -> f64 {
        self.k
    }
    fn frame(&self) -> Frame {
        Frame::Polar
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("R".into(), self.radius), ("p".into(), self.pressure), ("k".into(), self.k)]
    }
    fn subalgebra(&self) -> SubalgebraTag {
        SubalgebraTag::Theta3 { alpha: 0.0 }
    }
    fn state(&self, p: &Point2) -> Result<StressState> {
        let [r, phi] = polar_outside("nadai_vortex", self.radius, p)?;
        let q = (self.radius * self.radius / (r * r)).min(1.0);
        let half = 0.5 * q.acos();
        Ok(StressState {
            sigma: -self.k * (half + FRAC_PI_4).tan().ln() - self.pressure,
            theta: phi - FRAC_PI_2 + half,
            k: self.k,
        })
    }
    fn gradient(&self, p: &Point2) -> Result<Gradient> {
        let [r, _] = polar_outside("nadai_vortex", self.radius, p)?;
        let q = self.radius * self.radius / (r * r);
        let w = (1.0 - q * q).sqrt();
        Ok(Gradient {
            sigma: [-2.0 * self.k / (r * w), 0.0],
            theta: [q / (r * w), 1.0],
        })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        p.to_polar().map(|q| q.coords()[0] - self.radius).unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn cavity_examples() {
        let f = NadaiCavity::new(2.0, 0.3, 0.5).unwrap();
        let s = f.state(&Point2::polar(2.0, 0.0).unwrap()).unwrap();
        assert!((s.sigma - (0.5 - 0.3)).abs() < 1e-15 && (s.theta - FRAC_PI_4).abs() < 1e-15);
        let s = f.state(&Point2::polar(2.0 * E, 0.0).unwrap()).unwrap();
        assert!((s.sigma - (1.5 - 0.3)).abs() < 1e-14);
        assert!(f.state(&Point2::polar(1.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn vortex_examples() {
        let f = NadaiVortex::new(1.0, 0.0, 1.0).unwrap();
        let s = f.state(&Point2::polar(2f64.sqrt(), 0.0).unwrap()).unwrap();
        assert!((s.theta + PI / 3.0).abs() < 1e-15);
        assert!((s.sigma + (5.0 * PI / 12.0).tan().ln()).abs() < 1e-14);
        assert!((s.sigma + 1.3169578969248166).abs() < 1e-12);
        let far = f.state(&Point2::polar(1e8, 0.3).unwrap()).unwrap();
        assert!((far.theta - (0.3 - FRAC_PI_4)).abs() < 1e-12);
    }
}
