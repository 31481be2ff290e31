use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::catalog::{Gradient, StressField};
use crate::characteristics::{channel_envelopes, channel_net, ClosedEnvelope, CurveNet, Family};

use crate::error::{Error, Result};
use crate::numeric::bisect_newton;
use crate::plane::{check_k, Frame, Point2, StressState};
use crate::symmetry::SubalgebraTag;

const ROOT_TOL: f64 = 1e-12;

/// Flow through a converging wedge-shaped channel.
///
/// With `psi = theta - phi` (the polar slip angle) the factor system reduces to
/// `dtheta/dpsi = c / (c + sin 2 psi)`, so `theta = c J(psi) - c1` with
/// `J = int dpsi / (c + sin 2 psi)`, `phi = theta - psi`, and
/// `sigma = -2kc ln r - kc ln|c + sin 2 psi| + const`.
///
/// For `c^2 > 1` the default branch is bounded by the rough walls
/// `sin 2 psi = 0`; for `c^2 < 1` it is the open interval where
/// `c + sin 2 psi` keeps one sign and every ray carries exactly one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NadaiChannel {
    pub c: f64,
    pub k: f64,
    pub sigma_const: f64,
    pub c1: f64,
    psi_lo: f64,
    psi_hi: f64,
    open: bool,
}

impl NadaiChannel {
    pub fn new(c: f64, k: f64, sigma_const: f64, c1: f64) -> Result<Self> {
        check_k(k)?;
        if c == 0.0 || !c.is_finite() {
            return Err(Error::param("c", "must be finite and non-zero"));
        }
        if (c.abs() - 1.0).abs() < 1e-12 {
            return Err(Error::param(
                "c",
                "|c| = 1 is handled by nadai_channel_unit and nadai_channel_singular",
            ));
        }
        let (psi_lo, psi_hi, open) = if c > 1.0 {
            (-FRAC_PI_2, 0.0, false)
        } else if c < -1.0 {
            (0.0, FRAC_PI_2, false)
        } else {
            let delta = FRAC_PI_4 - 0.5 * c.abs().asin();
            let centre = if c > 0.0 { -FRAC_PI_4 } else { FRAC_PI_4 };
            (centre - delta, centre + delta, true)
        };
        Ok(NadaiChannel { c, k, sigma_const, c1, psi_lo, psi_hi, open })
    }

    /// Restricts the `psi` branch. For `c^2 > 1` the bracket must stay inside
    /// one monotone branch of `phi(psi)`.
    pub fn with_psi_bracket(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::param("psi_bracket", "lower end must be below upper end"));
        }
        self.psi_lo = lo;
        self.psi_hi = hi;
        Ok(self)
    }

    pub(crate) fn unit(a: f64, k: f64, sigma_const: f64) -> Result<Self> {
        check_k(k)?;
        Ok(NadaiChannel { c: 1.0, k, sigma_const, c1: -a, psi_lo: 0.0, psi_hi: FRAC_PI_2, open: false })
    }

    pub fn psi_bracket(&self) -> (f64, f64) {
        (self.psi_lo, self.psi_hi)
    }

    pub fn has_walls(&self) -> bool {
        !self.open
    }

    /// `int dpsi / (c + sin 2 psi)` on the active branch.
    pub fn j(&self, psi: f64) -> f64 {
        let c = self.c;
        if c == 1.0 {
            let (s, co) = psi.sin_cos();
            return -co / (co + s);
        }
        let (s, co) = psi.sin_cos();
        if c * c > 1.0 {
            let w = (c * c - 1.0).sqrt();
            (c * s + co).atan2(w * co) / w
        } else {
            let w = (1.0 - c * c).sqrt();
            -((c * psi.tan() + 1.0) / w).atanh() / w
        }
    }

    pub fn theta_of_psi(&self, psi: f64) -> f64 {
        self.c * self.j(psi) - self.c1
    }

    pub fn phi_of_psi(&self, psi: f64) -> f64 {
        self.theta_of_psi(psi) - psi
    }

    /// Polar slip angle on the ray `phi`.
    pub fn solve_psi(&self, phi: f64) -> Result<f64> {
        let (lo, hi) = if self.open {
            let eps = 1e-13 * (self.psi_hi - self.psi_lo);
            (self.psi_lo + eps, self.psi_hi - eps)
        } else {
            (self.psi_lo, self.psi_hi)
        };
        bisect_newton(|psi| self.phi_of_psi(psi) - phi, lo, hi, ROOT_TOL)
            .map(|psi| psi.clamp(lo, hi))
    }

    fn locate(&self, p: &Point2) -> Result<(f64, f64, f64)> {
        let [r, phi] = p.to_polar()?.coords();
        let psi = self.solve_psi(phi).map_err(|_| {
            Error::domain(
                "nadai_channel",
                format!(
                    "ray phi = {phi} lies outside the fan [{}, {}]",
                    self.phi_of_psi(self.psi_lo).min(self.phi_of_psi(self.psi_hi)),
                    self.phi_of_psi(self.psi_lo).max(self.phi_of_psi(self.psi_hi))
                ),
            )
        })?;
        Ok((r, phi, psi))
    }

    pub(crate) fn sigma_at(&self, r: f64, psi: f64) -> f64 {
        let c = self.c;
        -2.0 * self.k * c * r.ln() - self.k * c * (c + (2.0 * psi).sin()).abs().ln() + self.sigma_const
    }

    /// Half opening angle of the channel, `(phi(psi_hi) - phi(psi_lo)) / 2`.
    pub fn half_angle(&self) -> Option<f64> {
        self.has_walls()
            .then(|| 0.5 * (self.phi_of_psi(self.psi_hi) - self.phi_of_psi(self.psi_lo)).abs())
    }
}

impl StressField for NadaiChannel {
    fn name(&self) -> &str {
        "nadai_channel"
    }
    fn k(&self) -> f64 {
        self.k
    }
    fn frame(&self) -> Frame {
        Frame::Polar
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![
            ("c".into(), self.c),
            ("k".into(), self.k),
            ("const".into(), self.sigma_const),
            ("c1".into(), self.c1),
        ]
    }
    fn subalgebra(&self) -> SubalgebraTag {
        SubalgebraTag::Theta2 { alpha: -1.0 / (2.0 * self.k * self.c) }
    }
    fn state(&self, p: &Point2) -> Result<StressState> {
        let (r, phi, psi) = self.locate(p)?;
        Ok(StressState { sigma: self.sigma_at(r, psi), theta: phi + psi, k: self.k })
    }
    fn gradient(&self, p: &Point2) -> Result<Gradient> {
        let (r, _, psi) = self.locate(p)?;
        let (s2, c2) = (2.0 * psi).sin_cos();
        let (c, k) = (self.c, self.k);
        Ok(Gradient {
            sigma: [-2.0 * k * c / r, 2.0 * k * c * c2 / s2],
            theta: [0.0, -c / s2],
        })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        if self.open {
            return f64::INFINITY;
        }
        match self.locate(p) {
            Ok((r, _, psi)) => r * (psi - self.psi_lo).min(self.psi_hi - psi),
            Err(_) => 0.0,
        }
    }
    fn slip_net(&self, family: Family) -> Result<CurveNet> {
        channel_net(self, family)
    }
    fn closed_envelopes(&self) -> Result<Vec<ClosedEnvelope>> {
        channel_envelopes(self)
    }
}

/// The `c = 1` channel that stays regular: `phi = theta + arctan(1 + 1/(theta - A))`,
/// `sigma = -2k ln r - k ln(1 + sin 2(theta - phi)) + const`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NadaiChannelUnit {
    inner: NadaiChannel,
    pub a: f64,
}

impl NadaiChannelUnit {
    pub fn new(a: f64, k: f64, sigma_const: f64) -> Result<Self> {
        Ok(NadaiChannelUnit { inner: NadaiChannel::unit(a, k, sigma_const)?, a })
    }

    pub fn channel(&self) -> &NadaiChannel {
        &self.inner
    }
}

impl StressField for NadaiChannelUnit {
    fn name(&self) -> &str {
        "nadai_channel_unit"
    }
    fn k(&self) -> f64 {
        self.inner.k
    }
    fn frame(&self) -> Frame {
        Frame::Polar
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("A".into(), self.a), ("k".into(), self.inner.k), ("const".into(), self.inner.sigma_const)]
    }
    fn subalgebra(&self) -> SubalgebraTag {
        self.inner.subalgebra()
    }
    fn state(&self, p: &Point2) -> Result<StressState> {
        self.inner.state(p)
    }
    fn gradient(&self, p: &Point2) -> Result<Gradient> {
        self.inner.gradient(p)
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        self.inner.boundary_distance(p)
    }
    fn slip_net(&self, family: Family) -> Result<CurveNet> {
        channel_net(self.channel(), family)
    }
    fn closed_envelopes(&self) -> Result<Vec<ClosedEnvelope>> {
        channel_envelopes(self.channel())
    }
}

/// The singular `c = 1` relative of the channel, `theta - phi = pi/4`,
/// `sigma = 2k ln r + const`: a cavity state without a fixed radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NadaiChannelSingular {
    pub k: f64,
    pub sigma_const: f64,
}

impl NadaiChannelSingular {
    pub fn new(k: f64, sigma_const: f64) -> Result<Self> {
        check_k(k)?;
        Ok(NadaiChannelSingular { k, sigma_const })
    }
}

impl StressField for NadaiChannelSingular {
    fn name(&self) -> &str {
        "nadai_channel_singular"
    }
    fn k(&self) -> f64 {
        self.k
    }
    fn frame(&self) -> Frame {
        Frame::Polar
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("k".into(), self.k), ("const".into(), self.sigma_const)]
    }
    fn subalgebra(&self) -> SubalgebraTag {
        SubalgebraTag::Theta2 { alpha: 1.0 / (2.0 * self.k) }
    }
    fn state(&self, p: &Point2) -> Result<StressState> {
        let [r, phi] = p.to_polar()?.coords();
        Ok(StressState { sigma: 2.0 * self.k * r.ln() + self.sigma_const, theta: phi + FRAC_PI_4, k: self.k })
    }
    fn gradient(&self, p: &Point2) -> Result<Gradient> {
        let [r, _] = p.to_polar()?.coords();
        Ok(Gradient { sigma: [2.0 * self.k / r, 0.0], theta: [0.0, 1.0] })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::derivative;

    #[test]
    fn j_is_the_antiderivative() {
        for c in [2.0, -3.0, 0.5, -0.4, 1.0] {
            let ch = if c == 1.0 { NadaiChannel::unit(0.0, 0.5, 0.0).unwrap() } else { NadaiChannel::new(c, 0.5, 0.0, 0.0).unwrap() };
            let (lo, hi) = ch.psi_bracket();
            for i in 1..10 {
                let psi = lo + (hi - lo) * i as f64 / 10.0;
                let d = derivative(|t| ch.j(t), psi, 1e-5);
                let want = 1.0 / (c + (2.0 * psi).sin());
                assert!((d - want).abs() < 1e-8 * want.abs().max(1.0), "c={c} psi={psi} {d} {want}");
            }
        }
    }

    #[test]
    fn factor_system_holds() {
        let ch = NadaiChannel::new(2.0, 0.5, 0.0, 0.0).unwrap();
        for phi in [-0.2, 0.0, 0.3, 0.55] {
            let psi = ch.solve_psi(phi).unwrap();
            let dtheta = derivative(|f| ch.solve_psi(f).unwrap() + f, phi, 1e-6);
            assert!((dtheta * (2.0 * psi).sin() + 2.0).abs() < 1e-7);
        }
    }

    #[test]
    fn half_angle_relation() {
        let c: f64 = 2.0;
        let ch = NadaiChannel::new(c, 0.5, 0.0, 0.0).unwrap();
        let alpha = c / (c * c - 1.0).sqrt() * ((c + 1.0) / (c - 1.0)).sqrt().atan() - FRAC_PI_4;
        assert!((alpha - 0.4238014127586969).abs() < 1e-15);
        assert!((ch.half_angle().unwrap() - alpha).abs() < 1e-13);
        let mid = ch.phi_of_psi(-FRAC_PI_4);
        assert!((ch.phi_of_psi(0.0) - mid - alpha).abs() < 1e-13);
        assert!((mid - ch.phi_of_psi(-FRAC_PI_2) - alpha).abs() < 1e-13);
    }

    #[test]
    fn unit_channel_matches_closed_relation() {
        let a = 2.0;
        let f = NadaiChannelUnit::new(a, 0.5, 0.0).unwrap();
        let p = Point2::polar(1.3, a - 1.2).unwrap();
        let s = f.state(&p).unwrap();
        let phi = s.theta + (1.0 + 1.0 / (s.theta - a)).atan();
        assert!((phi - (a - 1.2)).abs() < 1e-11);
    }

    #[test]
    fn singular_invariant() {
        let f = NadaiChannelSingular::new(0.5, 0.0).unwrap();
        let s = f.state(&Point2::polar(3.0, 0.7).unwrap()).unwrap();
        assert!((s.theta - 0.7 - FRAC_PI_4).abs() < 1e-15);
    }
}
