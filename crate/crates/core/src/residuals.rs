//! Independent verification: finite differences, PDE residuals and grid sweeps.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{native, CharCoords, CharacteristicField, Gradient, StressField};
use crate::error::{Error, Result};
use crate::numeric::{default_step, fd_partial_vec};
use crate::plane::{levy_to_components, Frame, Point2, StressState};
use crate::velocity::{velocity_residual, VelocityField, VelocityGradient};

pub use crate::numeric::fd_partial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    /// Equilibrium in `(x, y)`.
    Cartesian,
    /// Equilibrium in `(r, phi)`.
    Polar,
    /// Polar equilibrium through the map from characteristic coordinates.
    Characteristic,
    /// Velocity compatibility and incompressibility.
    Velocity,
    /// `(sigma_x - sigma_y)^2 + 4 tau^2 - 4k^2`.
    Yield,
}

/// Partials of `(sigma, theta)` in the native frame of `field`, plus the native
/// point and the state there.
pub fn field_partials(field: &dyn StressField, p: &Point2, mode: DerivativeMode) -> Result<(Point2, StressState, Gradient)> {
    let q = native(field, p)?;
    let state = field.state(&q)?;
    let grad = match mode {
        DerivativeMode::Analytic => field.gradient(&q)?,
        DerivativeMode::FiniteDifference => {
            let frame = q.frame();
            let failed = RefCell::new(None);
            let f = |c: &[f64; 2]| {
                match Point2::new(frame, c[0], c[1]).and_then(|pt| field.state(&pt)) {
                    Ok(s) => [s.sigma, s.theta],
                    Err(e) => {
                        failed.borrow_mut().get_or_insert(e);
                        [f64::NAN; 2]
                    }
                }
            };
            let c = q.coords();
            let d0 = fd_partial_vec(f, &c, 0, default_step(c[0]));
            let d1 = fd_partial_vec(f, &c, 1, default_step(c[1]));
            if let Some(e) = failed.into_inner() {
                return Err(e);
            }
            Gradient { sigma: [d0[0], d1[0]], theta: [d0[1], d1[1]] }
        }
    };
    Ok((q, state, grad))
}

fn cartesian_from(k: f64, theta: f64, g: &Gradient) -> [f64; 2] {
    let (s2, c2) = (2.0 * theta).sin_cos();
    let [tx, ty] = g.theta;
    [
        g.sigma[0] - 2.0 * k * (tx * c2 + ty * s2),
        g.sigma[1] - 2.0 * k * (tx * s2 - ty * c2),
    ]
}

fn polar_from(k: f64, r: f64, phi: f64, theta: f64, g: &Gradient) -> [f64; 2] {
    let psi = theta - phi;
    let (s2, c2) = (2.0 * psi).sin_cos();
    let [tr, tp] = g.theta;
    [
        r * g.sigma[0] - 2.0 * k * (r * tr * c2 + tp * s2),
        g.sigma[1] - 2.0 * k * (r * tr * s2 - tp * c2),
    ]
}

/// `r1 = sigma_x - 2k(theta_x cos 2theta + theta_y sin 2theta)`,
/// `r2 = sigma_y - 2k(theta_x sin 2theta - theta_y cos 2theta)`.
pub fn residual_cartesian(field: &dyn StressField, p: &Point2, mode: DerivativeMode) -> Result<[f64; 2]> {
    if field.frame() != Frame::Cartesian {
        return Err(Error::UnsupportedField { field: field.name().into(), what: "cartesian partials".into() });
    }
    let (_, s, g) = field_partials(field, p, mode)?;
    Ok(cartesian_from(s.k, s.theta, &g))
}

/// With `psi = theta - phi`:
/// `r1 = r sigma_r - 2k(r theta_r cos 2psi + theta_phi sin 2psi)`,
/// `r2 = sigma_phi - 2k(r theta_r sin 2psi - theta_phi cos 2psi)`.
pub fn residual_polar(field: &dyn StressField, p: &Point2, mode: DerivativeMode) -> Result<[f64; 2]> {
    if field.frame() != Frame::Polar {
        return Err(Error::UnsupportedField { field: field.name().into(), what: "polar partials".into() });
    }
    let (q, s, g) = field_partials(field, p, mode)?;
    let [r, phi] = q.coords();
    Ok(polar_from(s.k, r, phi, s.theta, &g))
}

/// Residual of whichever equilibrium system matches the field's frame.
pub fn residual_stress(field: &dyn StressField, p: &Point2, mode: DerivativeMode) -> Result<[f64; 2]> {
    match field.frame() {
        Frame::Cartesian => residual_cartesian(field, p, mode),
        Frame::Polar => residual_polar(field, p, mode),
    }
}

/// Jacobian of `(r, phi, sigma, theta)` with respect to `(xi, eta)`.
pub fn characteristic_jacobian(
    field: &dyn CharacteristicField,
    c: CharCoords,
    mode: DerivativeMode,
) -> Result<[[f64; 2]; 4]> {
    match mode {
        DerivativeMode::Analytic => field.jacobian(c),
        DerivativeMode::FiniteDifference => {
            field.map(c)?;
            let failed = RefCell::new(None);
            let f = |q: &[f64; 2]| match field.map(CharCoords::new(q[0], q[1])) {
                Ok(m) => [m.r, m.phi, m.sigma, m.theta],
                Err(e) => {
                    failed.borrow_mut().get_or_insert(e);
                    [f64::NAN; 4]
                }
            };
            let at = [c.xi, c.eta];
            let d0 = fd_partial_vec(f, &at, 0, default_step(c.xi));
            let d1 = fd_partial_vec(f, &at, 1, default_step(c.eta));
            if let Some(e) = failed.into_inner() {
                return Err(e);
            }
            Ok([[d0[0], d1[0]], [d0[1], d1[1]], [d0[2], d1[2]], [d0[3], d1[3]]])
        }
    }
}

/// `d(r, phi)/d(xi, eta)`.
pub fn position_jacobian_det(j: &[[f64; 2]; 4]) -> f64 {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

/// Polar equilibrium residual of a field given on the characteristic net; the
/// `(r, phi)` partials come from inverting the position Jacobian.
pub fn residual_characteristic(field: &dyn CharacteristicField, c: CharCoords, mode: DerivativeMode) -> Result<[f64; 2]> {
    let m = field.map(c)?;
    let j = characteristic_jacobian(field, c, mode)?;
    let det = position_jacobian_det(&j);
    if det == 0.0 || !det.is_finite() {
        return Err(Error::SingularJacobian(det));
    }
    // [d/dr, d/dphi] = [d/dxi, d/deta] * inverse([[r_xi, r_eta], [phi_xi, phi_eta]])
    let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
    let pull = |row: [f64; 2]| [row[0] * inv[0][0] + row[1] * inv[1][0], row[0] * inv[0][1] + row[1] * inv[1][1]];
    let g = Gradient { sigma: pull(j[2]), theta: pull(j[3]) };
    Ok(polar_from(field.k(), m.r, m.phi, m.theta, &g))
}

/// Residual of the reduced equation
/// `d^2 ln|u| / dxi deta - (G'/2) d(1/u)/dxi + (F'/2) du/deta = 0`, all by differences.
pub fn eq_u_residual(
    u: impl Fn(f64, f64) -> f64,
    f_prime: impl Fn(f64) -> f64,
    g_prime: impl Fn(f64) -> f64,
    xi: f64,
    eta: f64,
) -> f64 {
    let hx = 1e-3 * xi.abs().max(1.0);
    let he = 1e-3 * eta.abs().max(1.0);
    let d = |f: &dyn Fn(f64) -> f64, x: f64, h: f64| crate::numeric::derivative(f, x, h);
    let dlnu_dxi = |e: f64| d(&|x: f64| u(x, e).abs().ln(), xi, hx);
    let mixed = d(&dlnu_dxi, eta, he);
    let inv_u_xi = d(&|x: f64| 1.0 / u(x, eta), xi, hx);
    let u_eta = d(&|e: f64| u(xi, e), eta, he);
    mixed - 0.5 * g_prime(eta) * inv_u_xi + 0.5 * f_prime(xi) * u_eta
}

/// Residual pair `(r1, r2)` of the velocity system; see [`velocity_residual`].
pub fn residual_velocity(vf: &dyn VelocityField, bg: &dyn StressField, p: &Point2, mode: DerivativeMode) -> Result<[f64; 2]> {
    velocity_residual(vf, bg, p, mode)
}

/// Rectangle in native coordinates: `a0 <= a <= a1`, `b0 <= b <= b1`.
/// For characteristic sweeps `a = xi`, `b = eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub frame: Frame,
}

impl Region {
    pub fn cartesian(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Region { a: [x0, x1], b: [y0, y1], frame: Frame::Cartesian }
    }

    pub fn polar(r0: f64, r1: f64, phi0: f64, phi1: f64) -> Self {
        Region { a: [r0, r1], b: [phi0, phi1], frame: Frame::Polar }
    }

    /// `n x n` lattice including the edges, row-major in `b`.
    pub fn lattice(&self, n: usize) -> Vec<[f64; 2]> {
        let n = n.max(2);
        let at = |r: [f64; 2], i: usize| r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64;
        (0..n).flat_map(|j| (0..n).map(move |i| [at(self.a, i), at(self.b, j)])).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub field: String,
    pub system: System,
    pub region: Region,
    pub grid_n: usize,
    pub mode: DerivativeMode,
    pub max_abs_residual: f64,
    pub mean_abs_residual: f64,
    pub worst_point: [f64; 2],
    pub evaluated: usize,
    /// Points skipped as outside the domain or within `margin` of a singular boundary.
    pub excluded: usize,
    pub margin: f64,
}

impl ResidualReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn aggregate(
    field: &str,
    system: System,
    region: Region,
    n: usize,
    mode: DerivativeMode,
    margin: f64,
    points: &[[f64; 2]],
    values: Vec<Option<f64>>,
) -> ResidualReport {
    let mut max = 0.0f64;
    let mut sum = 0.0;
    let mut worst = [f64::NAN; 2];
    let mut evaluated = 0;
    for (pt, v) in points.iter().zip(values) {
        if let Some(v) = v {
            evaluated += 1;
            sum += v;
            if v.is_nan() {
                if !max.is_nan() {
                    max = f64::NAN;
                    worst = *pt;
                }
            } else if !max.is_nan() && (v > max || worst[0].is_nan()) {
                max = v;
                worst = *pt;
            }
        }
    }
    ResidualReport {
        field: field.to_string(),
        system,
        region,
        grid_n: n,
        mode,
        max_abs_residual: max,
        mean_abs_residual: if evaluated > 0 { sum / evaluated as f64 } else { 0.0 },
        worst_point: worst,
        evaluated,
        excluded: points.len() - evaluated,
        margin,
    }
}

fn norm(r: [f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

/// Equilibrium residual (or yield residual with `System::Yield`) of a stress
/// field over an `n x n` lattice, in parallel with order-independent aggregation.
pub fn sweep_stress(
    field: &dyn StressField,
    system: System,
    region: Region,
    n: usize,
    mode: DerivativeMode,
    margin: f64,
) -> ResidualReport {
    let points = region.lattice(n);
    let values: Vec<Option<f64>> = points
        .par_iter()
        .map(|c| {
            let p = Point2::new(region.frame, c[0], c[1]).ok()?;
            if !field.contains(&p) || field.boundary_distance(&p) < margin {
                return None;
            }
            match system {
                System::Yield => {
                    let s = field.state(&p).ok()?;
                    Some(levy_to_components(&s).yield_residual(s.k).abs())
                }
                _ => residual_stress(field, &p, mode).ok().map(norm),
            }
        })
        .collect();
    let system = match system {
        System::Yield => System::Yield,
        _ if field.frame() == Frame::Cartesian => System::Cartesian,
        _ => System::Polar,
    };
    aggregate(field.name(), system, region, n, mode, margin, &points, values)
}

/// Velocity-system residual over the lattice, against the field's own background.
pub fn sweep_velocity(vf: &dyn VelocityField, region: Region, n: usize, mode: DerivativeMode, margin: f64) -> ResidualReport {
    let points = region.lattice(n);
    let values: Vec<Option<f64>> = points
        .par_iter()
        .map(|c| {
            let p = Point2::new(region.frame, c[0], c[1]).ok()?;
            if vf.boundary_distance(&p) < margin {
                return None;
            }
            residual_velocity(vf, vf.background(), &p, mode).ok().map(norm)
        })
        .collect();
    aggregate(vf.name(), System::Velocity, region, n, mode, margin, &points, values)
}

/// Polar residual of a characteristic field over a `(xi, eta)` lattice. Points with
/// `|xi|` or `|eta|` below `margin`, or with a relative position-Jacobian
/// determinant below `margin` (envelopes), are excluded.
pub fn sweep_characteristic(
    field: &dyn CharacteristicField,
    region: Region,
    n: usize,
    mode: DerivativeMode,
    margin: f64,
) -> ResidualReport {
    let points = region.lattice(n);
    let values: Vec<Option<f64>> = points
        .par_iter()
        .map(|c| {
            let cc = CharCoords::new(c[0], c[1]);
            if c[0].abs() < margin || c[1].abs() < margin {
                return None;
            }
            let j = field.jacobian(cc).ok()?;
            let det = position_jacobian_det(&j);
            let scale = (j[0][0] * j[1][1]).abs() + (j[0][1] * j[1][0]).abs();
            if det.abs() < margin * scale {
                return None;
            }
            residual_characteristic(field, cc, mode).ok().map(norm)
        })
        .collect();
    let region = Region { frame: Frame::Cartesian, ..region };
    aggregate(field.name(), System::Characteristic, region, n, mode, margin, &points, values)
}

/// `u + eps x^2`: a defective velocity field for sensitivity checks.
#[derive(Debug)]
pub struct PerturbedVelocity<V> {
    inner: V,
    eps: f64,
    name: String,
}

impl<V: VelocityField> PerturbedVelocity<V> {
    pub fn new(inner: V, eps: f64) -> Self {
        let name = format!("{}+perturbation", inner.name());
        PerturbedVelocity { inner, eps, name }
    }
}

impl<V: VelocityField> VelocityField for PerturbedVelocity<V> {
    fn name(&self) -> &str {
        &self.name
    }
    fn params(&self) -> Vec<(String, f64)> {
        self.inner.params()
    }
    fn background(&self) -> &dyn StressField {
        self.inner.background()
    }
    fn eval(&self, p: &Point2) -> Result<[f64; 2]> {
        let x = p.xy()[0];
        let [u, v] = self.inner.eval(p)?;
        Ok([u + self.eps * x * x, v])
    }
    fn gradient(&self, p: &Point2) -> Result<VelocityGradient> {
        let x = p.xy()[0];
        let mut g = self.inner.gradient(p)?;
        g.u[0] += 2.0 * self.eps * x;
        Ok(g)
    }
    fn boundary_distance(&self, p: &Point2) -> f64 {
        self.inner.boundary_distance(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{NadaiVortex, Perturbed, Prandtl, Revuzhenko, RevuzhenkoSign};

    #[test]
    fn fd_partial_examples() {
        let d = fd_partial(|p: &[f64; 1]| p[0] * p[0], &[3.0], 0, 1e-3);
        assert!((d - 6.0).abs() < 1e-9);
        let d = fd_partial(|p: &[f64; 1]| p[0].sin(), &[0.0], 0, 1e-3);
        assert!((d - 1.0).abs() < 1e-10);
    }

    #[test]
    fn prandtl_and_defect() {
        let f = Prandtl::default();
        let p = Point2::cartesian(0.4, 0.3);
        for mode in [DerivativeMode::Analytic, DerivativeMode::FiniteDifference] {
            let r = residual_cartesian(&f, &p, mode).unwrap();
            assert!(norm(r) < 1e-9);
        }
        let bad = Perturbed::new(f, 0.01);
        let r = residual_cartesian(&bad, &p, DerivativeMode::Analytic).unwrap();
        assert!((r[0] - 0.02 * 0.4).abs() < 1e-12);
    }

    #[test]
    fn vortex_polar() {
        let f = NadaiVortex::new(1.0, 0.0, 1.0).unwrap();
        let r = residual_polar(&f, &Point2::polar(1.7, 0.2).unwrap(), DerivativeMode::Analytic).unwrap();
        assert!(norm(r) < 1e-12);
    }

    #[test]
    fn revuzhenko_chain_and_eq_u() {
        for sign in [RevuzhenkoSign::Upper, RevuzhenkoSign::Lower] {
            let f = Revuzhenko::new(sign);
            let c = CharCoords::new(0.9, 1.3);
            let r = residual_characteristic(&f, c, DerivativeMode::Analytic).unwrap();
            assert!(norm(r) < 1e-10, "{r:?}");
            let s = sign.value();
            let res = eq_u_residual(|x, e| s * e / x, |x| 4.0 * x, |e| 4.0 * e, 0.9, 1.3);
            assert!(res.abs() < 1e-8);
        }
    }

    #[test]
    fn lattice_is_deterministic() {
        let r = Region::cartesian(-1.0, 1.0, 0.0, 2.0);
        let l = r.lattice(3);
        assert_eq!(l.len(), 9);
        assert_eq!(l[0], [-1.0, 0.0]);
        assert_eq!(l[8], [1.0, 2.0]);
    }
}
