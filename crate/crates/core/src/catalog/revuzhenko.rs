use std::f64::consts::FRAC_PI_4;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{Point2, StressState};
use crate::symmetry::SubalgebraTag;

/// Characteristic coordinates `(xi, eta)` of a field given on the
/// characteristic net.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharCoords {
    pub xi: f64,
    pub eta: f64,
}

impl CharCoords {
    pub fn new(xi: f64, eta: f64) -> Self {
        CharCoords { xi, eta }
    }
}

/// Image of a characteristic point: polar position and stress.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharMap {
    pub r: f64,
    pub phi: f64,
    pub sigma: f64,
    pub theta: f64,
}

impl CharMap {
    pub fn point(&self) -> Result<Point2> {
        Point2::polar(self.r, self.phi)
    }
}

/// A solution parameterized by characteristic coordinates rather than by
/// position. Rows of the Jacobian are `(r, phi, sigma, theta)`, columns
/// `(xi, eta)`.
pub trait CharacteristicField: Send + Sync + Debug {
    fn name(&self) -> &str;
    fn k(&self) -> f64;
    fn subalgebra(&self) -> SubalgebraTag;
    fn map(&self, c: CharCoords) -> Result<CharMap>;
    fn jacobian(&self, c: CharCoords) -> Result<[[f64; 2]; 4]>;

    fn state(&self, c: CharCoords) -> Result<(Point2, StressState)> {
        let m = self.map(c)?;
        Ok((m.point()?, StressState { sigma: m.sigma, theta: m.theta, k: self.k() }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RevuzhenkoSign {
    Upper,
    Lower,
}

impl RevuzhenkoSign {
    pub fn value(self) -> f64 {
        match self {
            RevuzhenkoSign::Upper => 1.0,
            RevuzhenkoSign::Lower => -1.0,
        }
    }
}

/// Separable solution on the characteristic net with `2k = 1`:
/// `sigma = xi^2 + eta^2`, `theta = eta^2 - xi^2 - pi/4`,
/// `phi = theta -+ arctan(eta/xi)`, `r = exp(+-2 xi eta) sqrt(xi^-2 + eta^-2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Revuzhenko {
    pub sign: RevuzhenkoSign,
}

impl Revuzhenko {
    pub const K: f64 = 0.5;

    pub fn new(sign: RevuzhenkoSign) -> Self {
        Revuzhenko { sign }
    }

    fn check(c: CharCoords) -> Result<()> {
        if c.xi == 0.0 || c.eta == 0.0 || !c.xi.is_finite() || !c.eta.is_finite() {
            return Err(Error::SingularCoords { xi: c.xi, eta: c.eta });
        }
        Ok(())
    }

    /// `tan theta_p = +-eta/xi`.
    pub fn tan_theta_p(&self, c: CharCoords) -> Result<f64> {
        Self::check(c)?;
        Ok(self.sign.value() * c.eta / c.xi)
    }

    /// Solution of the reduced equation, `u = eta / xi`.
    pub fn u(c: CharCoords) -> f64 {
        c.eta / c.xi
    }
}

impl CharacteristicField for Revuzhenko {
    fn name(&self) -> &str {
        match self.sign {
            RevuzhenkoSign::Upper => "revuzhenko_upper",
            RevuzhenkoSign::Lower => "revuzhenko_lower",
        }
    }
    fn k(&self) -> f64 {
        Self::K
    }
    fn subalgebra(&self) -> SubalgebraTag {
        SubalgebraTag::Theta1 { alpha: 0.0 }
    }
    fn map(&self, c: CharCoords) -> Result<CharMap> {
        Self::check(c)?;
        let (xi, eta) = (c.xi, c.eta);
        let s = self.sign.value();
        let theta = eta * eta - xi * xi - FRAC_PI_4;
        Ok(CharMap {
            r: (2.0 * s * xi * eta).exp() * (1.0 / (xi * xi) + 1.0 / (eta * eta)).sqrt(),
            phi: theta - s * (eta / xi).atan(),
            sigma: xi * xi + eta * eta,
            theta,
        })
    }
    fn jacobian(&self, c: CharCoords) -> Result<[[f64; 2]; 4]> {
        let m = self.map(c)?;
        let (xi, eta) = (c.xi, c.eta);
        let s = self.sign.value();
        let q = xi * xi + eta * eta;
        let lnr_xi = 2.0 * s * eta - eta * eta / (xi * q);
        let lnr_eta = 2.0 * s * xi - xi * xi / (eta * q);
        Ok([
            [m.r * lnr_xi, m.r * lnr_eta],
            [-2.0 * xi + s * eta / q, 2.0 * eta - s * xi / q],
            [2.0 * xi, 2.0 * eta],
            [-2.0 * xi, 2.0 * eta],
        ])
    }
}

/// `sigma + eps xi^2`: a defective characteristic field for sensitivity checks.
#[derive(Debug, Clone)]
pub struct PerturbedChar<F> {
    inner: F,
    eps: f64,
}

impl<F: CharacteristicField> PerturbedChar<F> {
    pub fn new(inner: F, eps: f64) -> Self {
        PerturbedChar { inner, eps }
    }
}

impl<F: CharacteristicField> CharacteristicField for PerturbedChar<F> {
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn k(&self) -> f64 {
        self.inner.k()
    }
    fn subalgebra(&self) -> SubalgebraTag {
        self.inner.subalgebra()
    }
    fn map(&self, c: CharCoords) -> Result<CharMap> {
        let mut m = self.inner.map(c)?;
        m.sigma += self.eps * c.xi * c.xi;
        Ok(m)
    }
    fn jacobian(&self, c: CharCoords) -> Result<[[f64; 2]; 4]> {
        let mut j = self.inner.jacobian(c)?;
        j[2][0] += 2.0 * self.eps * c.xi;
        Ok(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::fd_partial;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn worked_example() {
        let f = Revuzhenko::new(RevuzhenkoSign::Upper);
        let m = f.map(CharCoords::new(0.5, 0.5)).unwrap();
        assert!((m.sigma - 0.5).abs() < 1e-15);
        assert!((m.theta + FRAC_PI_4).abs() < 1e-15);
        assert!((m.r - 2.0 * 2f64.sqrt() * 0.5f64.exp()).abs() < 1e-14);
        assert!((m.phi + FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(f.map(CharCoords::new(0.0, 1.0)), Err(Error::SingularCoords { .. })));
    }

    #[test]
    fn jacobian_matches_differences() {
        for sign in [RevuzhenkoSign::Upper, RevuzhenkoSign::Lower] {
            let f = Revuzhenko::new(sign);
            let c = CharCoords::new(0.37, -0.81);
            let j = f.jacobian(c).unwrap();
            for (row, pick) in [|m: CharMap| m.r, |m: CharMap| m.phi, |m: CharMap| m.sigma, |m: CharMap| m.theta]
                .iter()
                .enumerate()
            {
                for col in 0..2 {
                    let d = fd_partial(
                        |p: &[f64; 2]| pick(f.map(CharCoords::new(p[0], p[1])).unwrap()),
                        &[c.xi, c.eta],
                        col,
                        1e-4,
                    );
                    assert!((d - j[row][col]).abs() < 1e-8 * j[row][col].abs().max(1.0));
                }
            }
        }
    }
}
