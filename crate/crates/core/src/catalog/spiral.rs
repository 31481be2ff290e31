use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use crate::catalog::{Gradient, StressField};
use crate::characteristics::Family;
use crate::characteristics::{spiral_envelopes, spiral_net, ClosedEnvelope, CurveNet};
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, bisect_newton};
use crate::plane::{check_k, Frame, Point2, StressState};
use crate::symmetry::SubalgebraTag;

const QUAD_TOL: f64 = 1e-10;
const ROOT_TOL: f64 = 1e-12;
const DENOM_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpiralIntegration {
    /// Elementary antiderivatives; only for `alpha = 1`, `A = 2 sqrt(2) k`.
    ClosedForm,
    Quadrature,
}

/// Spiral solution `sigma = A phi + f(lambda)`, `theta = phi + g(lambda)`,
/// `lambda = r exp(-alpha phi)`.
///
/// `g` is recovered from `ln lambda = L(g) + c0`, where
/// `L' = D/N`, `D = 2 alpha cos 2g + (1 - alpha^2) sin 2g`,
/// `N = A/(2k) + cos 2g - alpha sin 2g`, and `L(g_ref) = 0` at the midpoint of
/// the branch. The branch lies between consecutive zeros of `D`; those zeros
/// are the two envelopes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spiral {
    pub a_coef: f64,
    pub alpha: f64,
    pub k: f64,
    pub lambda_const: f64,
    pub sigma_const: f64,
    g_lo: f64,
    g_hi: f64,
    integration: SpiralIntegration,
}

const T0: f64 = SQRT_2 + 1.0;

/// `int D/N dg` for `alpha = 1`, `A = 2 sqrt(2) k`.
pub fn i2(g: f64) -> f64 {
    let (s, c) = g.sin_cos();
    let w = s - T0 * c;
    g - w.abs().ln() + (2.0 + SQRT_2) * c / w
}

/// `-int D/N / (tan g + 1) dg` for `alpha = 1`, `A = 2 sqrt(2) k`.
pub fn i1(g: f64) -> f64 {
    let (s, c) = g.sin_cos();
    -c / (s - T0 * c) - g
}

/// `int D/N / (cot g - 1) dg` for `alpha = 1`, `A = 2 sqrt(2) k`.
pub fn i1_tilde(g: f64) -> f64 {
    let (s, c) = g.sin_cos();
    -T0 * T0 * c / (s - T0 * c) - g
}

impl Spiral {
    pub fn new(a_coef: f64, alpha: f64, k: f64) -> Result<Self> {
        check_k(k)?;
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::param("alpha", "must be finite and non-zero"));
        }
        if !a_coef.is_finite() || a_coef == 0.0 {
            return Err(Error::param("A", "must be finite and non-zero"));
        }
        if ((a_coef.abs() - 2.0 * k) / k).abs() < 1e-12 {
            return Err(Error::param("A", "A = +-2k is a simple wave; use simple_wave"));
        }
        let delta = (2.0 * alpha).atan2(1.0 - alpha * alpha);
        let g_lo = -0.5 * delta;
        let g_hi = 0.5 * (std::f64::consts::PI - delta);
        let special = (alpha - 1.0).abs() < 1e-15 && (a_coef / k - 2.0 * SQRT_2).abs() < 1e-12;
        let spiral = Spiral {
            a_coef,
            alpha,
            k,
            lambda_const: 0.0,
            sigma_const: 0.0,
            g_lo,
            g_hi,
            integration: if special { SpiralIntegration::ClosedForm } else { SpiralIntegration::Quadrature },
        };
        for i in 0..=400 {
            let g = g_lo + (g_hi - g_lo) * i as f64 / 400.0;
            if spiral.n(g).abs() < DENOM_FLOOR {
                return Err(Error::QuadratureSingularity { at: g });
            }
        }
        if spiral.n(g_lo).signum() != spiral.n(g_hi).signum() {
            return Err(Error::QuadratureSingularity { at: 0.5 * (g_lo + g_hi) });
        }
        Ok(spiral)
    }

    /// The case with elementary integrals, `alpha = 1`, `A = 2 sqrt(2) k`.
    pub fn canonical(k: f64) -> Result<Self> {
        Self::new(2.0 * SQRT_2 * k, 1.0, k)
    }

    pub fn with_constants(mut self, lambda_const: f64, sigma_const: f64) -> Self {
        self.lambda_const = lambda_const;
        self.sigma_const = sigma_const;
        self
    }

    pub fn with_integration(mut self, integration: SpiralIntegration) -> Result<Self> {
        if integration == SpiralIntegration::ClosedForm && self.integration != SpiralIntegration::ClosedForm {
            return Err(Error::UnsupportedField {
                field: "spiral".into(),
                what: "closed-form integrals for these parameters".into(),
            });
        }
        self.integration = integration;
        Ok(self)
    }

    pub fn integration(&self) -> SpiralIntegration {
        self.integration
    }

    pub fn branch(&self) -> (f64, f64) {
        (self.g_lo, self.g_hi)
    }

    fn g_ref(&self) -> f64 {
        0.5 * (self.g_lo + self.g_hi)
    }

    pub fn d(&self, g: f64) -> f64 {
        let (s2, c2) = (2.0 * g).sin_cos();
        2.0 * self.alpha * c2 + (1.0 - self.alpha * self.alpha) * s2
    }

    pub fn n(&self, g: f64) -> f64 {
        let (s2, c2) = (2.0 * g).sin_cos();
        self.a_coef / (2.0 * self.k) + c2 - self.alpha * s2
    }

    fn df_dg(&self, g: f64) -> f64 {
        let (s2, c2) = (2.0 * g).sin_cos();
        let m = c2 - self.alpha * s2;
        let k2 = 2.0 * self.k;
        k2 * (k2 + self.a_coef * m) / (self.a_coef + k2 * m)
    }

    /// `d phi / dg` along a slip line of `family`.
    fn dphi_dg(&self, family: Family, g: f64) -> f64 {
        let (s, c) = g.sin_cos();
        match family {
            Family::First => 2.0 * s * (self.alpha * c + s) / self.n(g),
            Family::Second => -2.0 * c * (c - self.alpha * s) / self.n(g),
        }
    }

    /// `L(g) = ln lambda - c0`.
    pub fn ln_lambda_offset(&self, g: f64) -> Result<f64> {
        match self.integration {
            SpiralIntegration::ClosedForm => Ok(i2(g) - i2(self.g_ref())),
            SpiralIntegration::Quadrature => {
                adaptive_simpson(|t| self.d(t) / self.n(t), self.g_ref(), g, QUAD_TOL)
            }
        }
    }

    /// Angle increment along a slip line of `family` from `g_ref` to `g`.
    pub fn family_phi(&self, family: Family, g: f64) -> Result<f64> {
        match (self.integration, family) {
            (SpiralIntegration::ClosedForm, Family::Second) => Ok(i1(g) - i1(self.g_ref())),
            (SpiralIntegration::ClosedForm, Family::First) => Ok(i1_tilde(g) - i1_tilde(self.g_ref())),
            (SpiralIntegration::Quadrature, _) => {
                adaptive_simpson(|t| self.dphi_dg(family, t), self.g_ref(), g, QUAD_TOL)
            }
        }
    }

    fn f_of_g(&self, g: f64) -> Result<f64> {
        Ok(adaptive_simpson(|t| self.df_dg(t), self.g_ref(), g, QUAD_TOL)? + self.sigma_const)
    }

    /// `g` on the ray point with `ln lambda = ln_lambda`.
    pub fn solve_g(&self, ln_lambda: f64) -> Result<f64> {
        let target = ln_lambda - self.lambda_const;
        let eps = 1e-12;
        let (lo, hi) = (self.g_lo + eps, self.g_hi - eps);
        let l = |g: f64| self.ln_lambda_offset(g).unwrap_or(f64::NAN) - target;
        bisect_newton(l, lo, hi, ROOT_TOL)
    }

    fn locate(&self, p: &Point2) -> Result<(f64, f64, f64)> {
        let [r, phi] = p.to_polar()?.coords();
        let ln_lambda = r.ln() - self.alpha * phi;
        let g = self.solve_g(ln_lambda).map_err(|_| {
            Error::domain("spiral", format!("ln lambda = {ln_lambda} lies outside the branch between the envelopes"))
        })?;
        Ok((r, phi, g))
    }

    /// The envelope enveloping `family`: `ln r = alpha phi + L(g_end) + c0`.
    /// Returns `(g_end, L(g_end) + c0)`.
    pub fn envelope(&self, family: Family) -> Result<(f64, f64)> {
        let g = match family {
            Family::First => self.g_hi,
            Family::Second => self.g_lo,
        };
        Ok((g, self.ln_lambda_offset(g)? + self.lambda_const))
    }
}

impl StressField for Spiral {
    fn name(&self) -> &str {
        "spiral"
    }
    fn k(&self) -> f64 {
        self.k
    }
    fn frame(&self) -> Frame {
        Frame::Polar
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![
            ("A".into(), self.a_coef),
            ("alpha".into(), self.alpha),
            ("k".into(), self.k),
            ("lambda_const".into(), self.lambda_const),
            ("const".into(), self.sigma_const),
        ]
    }
    fn subalgebra(&self) -> SubalgebraTag {
        SubalgebraTag::Theta4 { sign: 1, weight: self.a_coef, alpha: self.alpha }
    }
    fn state(&self, p: &Point2) -> Result<StressState> {
        let (_, phi, g) = self.locate(p)?;
        Ok(StressState {
            sigma: self.a_coef * phi + self.f_of_g(g)?,
            theta: phi + g,
            k: self.k,
        })
    }
    fn gradient(&self, p: &Point2) -> Result<Gradient> {
        let (r, _, g) = self.locate(p)?;
        let ratio = self.n(g) / self.d(g);
        let g_r = ratio / r;
        let g_phi = -self.alpha * ratio;
        let f_g = self.df_dg(g);
        Ok(Gradient {
            sigma: [f_g * g_r, self.a_coef + f_g * g_phi],
            theta: [g_r, 1.0 + g_phi],
        })
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        match self.locate(p) {
            Ok((r, _, g)) => r * (g - self.g_lo).min(self.g_hi - g),
            Err(_) => 0.0,
        }
    }
    fn slip_net(&self, family: Family) -> Result<CurveNet> {
        spiral_net(self, family)
    }
    fn closed_envelopes(&self) -> Result<Vec<ClosedEnvelope>> {
        spiral_envelopes(self)
    }
}

/// Difference of the two envelope offsets for the canonical spiral,
/// `I2(pi/4) - I2(-pi/4) = pi/2 - sqrt 2 + ln(2 + sqrt 2) - ln(2)/2`.
pub fn canonical_envelope_gap() -> f64 {
    FRAC_PI_2 - SQRT_2 + (2.0 + SQRT_2).ln() - 0.5 * 2f64.ln()
}

#[allow(dead_code)]
fn canonical_branch() -> (f64, f64) {
    (-FRAC_PI_4, FRAC_PI_4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::derivative;

    #[test]
    fn closed_forms_are_antiderivatives() {
        let s = Spiral::canonical(0.5).unwrap();
        for g in [-0.7, -0.3, 0.0, 0.2, 0.6] {
            assert!((derivative(i2, g, 1e-5) - s.d(g) / s.n(g)).abs() < 1e-8);
            assert!((derivative(i1, g, 1e-5) - s.dphi_dg(Family::Second, g)).abs() < 1e-8);
            assert!((derivative(i1_tilde, g, 1e-5) - s.dphi_dg(Family::First, g)).abs() < 1e-8);
        }
    }

    #[test]
    fn closed_form_and_quadrature_agree() {
        let a = Spiral::canonical(0.5).unwrap();
        let b = a.with_integration(SpiralIntegration::Quadrature).unwrap();
        assert_eq!(canonical_branch(), a.branch());
        for g in [-0.7, -0.2, 0.4, 0.78] {
            assert!((a.ln_lambda_offset(g).unwrap() - b.ln_lambda_offset(g).unwrap()).abs() < 1e-9);
            for fam in [Family::First, Family::Second] {
                assert!((a.family_phi(fam, g).unwrap() - b.family_phi(fam, g).unwrap()).abs() < 1e-9);
            }
        }
        let p = Point2::polar(1.1, 0.3).unwrap();
        let (sa, sb) = (a.state(&p).unwrap(), b.state(&p).unwrap());
        assert!((sa.sigma - sb.sigma).abs() < 1e-9 && (sa.theta - sb.theta).abs() < 1e-9);
    }

    #[test]
    fn envelope_gap() {
        let s = Spiral::canonical(0.5).unwrap();
        let (_, hi) = s.envelope(Family::First).unwrap();
        let (_, lo) = s.envelope(Family::Second).unwrap();
        assert!((hi - lo - canonical_envelope_gap()).abs() < 1e-12);
        assert!((canonical_envelope_gap() - 1.037956).abs() < 1e-6);
    }

    #[test]
    fn rejects_simple_wave_coefficient() {
        assert!(Spiral::new(1.0, 1.0, 0.5).is_err());
        assert!(Spiral::new(-1.0, 1.0, 0.5).is_err());
    }
}
