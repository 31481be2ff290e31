//! Closed-form stress solutions of the plane plasticity system.
//!
//! Every field reports `theta` in the cartesian convention. Fields declared in
//! the polar frame take `(r, phi)` as native coordinates and their partials are
//! with respect to `r` and `phi`.

mod channel;
mod nadai;
mod prandtl;
mod registry;
mod revuzhenko;
mod simple_wave;
pub mod spiral;
mod two_circles;

use std::fmt::Debug;

use crate::characteristics::{ClosedEnvelope, CurveNet, Family};
use crate::error::{Error, Result};
use crate::plane::{Frame, Point2, StressState};
use crate::symmetry::SubalgebraTag;

pub use channel::{NadaiChannel, NadaiChannelSingular, NadaiChannelUnit};
pub use nadai::{NadaiCavity, NadaiVortex};
pub use prandtl::Prandtl;
pub use registry::{build, build_characteristic, SOLUTIONS};
pub use revuzhenko::{CharCoords, CharacteristicField, CharMap, PerturbedChar, Revuzhenko, RevuzhenkoSign};
pub use simple_wave::{SimpleWave, ThetaBracket};
pub use spiral::{Spiral, SpiralIntegration};
pub use two_circles::NadaiTwoCircles;

/// First partials of `(sigma, theta)` with respect to the native coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub sigma: [f64; 2],
    pub theta: [f64; 2],
}

pub trait StressField: Send + Sync + Debug {
    fn name(&self) -> &str;
    fn k(&self) -> f64;
    fn frame(&self) -> Frame;
    fn params(&self) -> Vec<(String, f64)>;
    fn subalgebra(&self) -> SubalgebraTag;

    /// `(sigma, theta)` at `p`; `p` may be given in either frame.
    fn state(&self, p: &Point2) -> Result<StressState>;

    /// Analytic partials in the native frame.
    fn gradient(&self, p: &Point2) -> Result<Gradient>;

    fn contains(&self, p: &Point2) -> bool {
        self.state(p).is_ok()
    }

    /// Distance-like measure to the nearest singular boundary (where the
    /// direction field or the partials degenerate). Infinite when none.
    fn boundary_distance(&self, _p: &Point2) -> f64 {
        f64::INFINITY
    }

    /// Closed-form slip lines of `family` as a two-parameter net.
    fn slip_net(&self, _family: Family) -> Result<CurveNet> {
        Err(Error::UnsupportedField { field: self.name().to_string(), what: "closed-form slip lines".into() })
    }

    /// The documented envelopes of the slip lines.
    fn closed_envelopes(&self) -> Result<Vec<ClosedEnvelope>> {
        Err(Error::NoEnvelope(format!("{} has no documented envelope", self.name())))
    }
}

/// Converts `p` into the native frame of `field`.
pub fn native(field: &dyn StressField, p: &Point2) -> Result<Point2> {
    p.in_frame(field.frame())
}

/// The discrete reflection `(phi, sigma, theta) -> (-phi, -sigma, -theta)` of a
/// polar field, or `(x, sigma, theta) -> (-x, -sigma, -theta)` of a cartesian one.
#[derive(Debug)]
pub struct Reflected<F> {
    inner: F,
    name: String,
}

impl<F: StressField> Reflected<F> {
    pub fn new(inner: F) -> Self {
        let name = format!("reflected_{}", inner.name());
        Reflected { inner, name }
    }

    fn mirror(&self, p: &Point2) -> Result<Point2> {
        let q = native(&self.inner, p)?;
        let [a, b] = q.coords();
        match q.frame() {
            Frame::Cartesian => Ok(Point2::cartesian(-a, b)),
            Frame::Polar => Point2::polar(a, -b),
        }
    }
}

impl<F: StressField> StressField for Reflected<F> {
    fn name(&self) -> &str {
        &self.name
    }
    fn k(&self) -> f64 {
        self.inner.k()
    }
    fn frame(&self) -> Frame {
        self.inner.frame()
    }
    fn params(&self) -> Vec<(String, f64)> {
        self.inner.params()
    }
    fn subalgebra(&self) -> SubalgebraTag {
        SubalgebraTag::Unspecified
    }
    fn state(&self, p: &Point2) -> Result<StressState> {
        let s = self.inner.state(&self.mirror(p)?)?;
        Ok(StressState { sigma: -s.sigma, theta: -s.theta, k: s.k })
    }
    fn gradient(&self, p: &Point2) -> Result<Gradient> {
        let g = self.inner.gradient(&self.mirror(p)?)?;
        // Cartesian mirrors the first coordinate, polar the second.
        let flip = match self.frame() {
            Frame::Cartesian => 0,
            Frame::Polar => 1,
        };
        let mut out = Gradient {
            sigma: [-g.sigma[0], -g.sigma[1]],
            theta: [-g.theta[0], -g.theta[1]],
        };
        out.sigma[flip] = -out.sigma[flip];
        out.theta[flip] = -out.theta[flip];
        Ok(out)
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        self.mirror(p).map(|q| self.inner.boundary_distance(&q)).unwrap_or(0.0)
    }
}

/// A deliberately broken field: `sigma + eps * a^2`, `a` the first native
/// coordinate. Used to show that residual checks detect defects.
#[derive(Debug)]
pub struct Perturbed<F> {
    inner: F,
    eps: f64,
    name: String,
}

impl<F: StressField> Perturbed<F> {
    pub fn new(inner: F, eps: f64) -> Self {
        let name = format!("{}+perturbation", inner.name());
        Perturbed { inner, eps, name }
    }
}

impl<F: StressField> StressField for Perturbed<F> {
    fn name(&self) -> &str {
        &self.name
    }
    fn k(&self) -> f64 {
        self.inner.k()
    }
    fn frame(&self) -> Frame {
        self.inner.frame()
    }
    fn params(&self) -> Vec<(String, f64)> {
        let mut p = self.inner.params();
        p.push(("perturbation".to_string(), self.eps));
        p
    }
    fn subalgebra(&self) -> SubalgebraTag {
        self.inner.subalgebra()
    }
    fn state(&self, p: &Point2) -> Result<StressState> {
        let a = native(&self.inner, p)?.coords()[0];
        let mut s = self.inner.state(p)?;
        s.sigma += self.eps * a * a;
        Ok(s)
    }
    fn gradient(&self, p: &Point2) -> Result<Gradient> {
        let a = native(&self.inner, p)?.coords()[0];
        let mut g = self.inner.gradient(p)?;
        g.sigma[0] += 2.0 * self.eps * a;
        Ok(g)
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        self.inner.boundary_distance(p)
    }
}

impl StressField for Box<dyn StressField> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn k(&self) -> f64 {
        (**self).k()
    }
    fn frame(&self) -> Frame {
        (**self).frame()
    }
    fn params(&self) -> Vec<(String, f64)> {
        (**self).params()
    }
    fn subalgebra(&self) -> SubalgebraTag {
        (**self).subalgebra()
    }
    fn state(&self, p: &Point2) -> Result<StressState> {
        (**self).state(p)
    }
    fn gradient(&self, p: &Point2) -> Result<Gradient> {
        (**self).gradient(p)
    }
    fn contains(&self, p: &Point2) -> bool {
        (**self).contains(p)
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        (**self).boundary_distance(p)
    }
    fn slip_net(&self, family: Family) -> Result<CurveNet> {
        (**self).slip_net(family)
    }
    fn closed_envelopes(&self) -> Result<Vec<ClosedEnvelope>> {
        (**self).closed_envelopes()
    }
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(crate::error::Error::param(name, format!("must be positive, got {v}")))
    }
}
