//! Closed-form slip-line families as two-parameter nets `(u, v) -> (x, y)`:
//! `u` labels a curve of the family, `v` runs along it.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use serde_json::Value;

use crate::catalog::{
    build, CharCoords, CharacteristicField, NadaiChannel, NadaiTwoCircles, Prandtl, Revuzhenko, RevuzhenkoSign,
    SimpleWave, Spiral, StressField,
};
use crate::characteristics::{Family, Polyline};
use crate::error::{Error, Result};
use crate::plane::{Point2, StressState};

type NetPoint = Arc<dyn Fn(f64, f64) -> Result<[f64; 2]> + Send + Sync>;
type NetLocate = Arc<dyn Fn(&Point2, &StressState) -> Result<[f64; 2]> + Send + Sync>;
type NetDet = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

const NET_STEP: f64 = 1e-4;

#[derive(Clone)]
pub struct CurveNet {
    pub label: String,
    pub family: Family,
    /// Name of the curve label `u`.
    pub u_name: &'static str,
    /// Name of the parameter `v` along a curve.
    pub v_name: &'static str,
    /// `[u0, u1, v0, v1]` used when no box is given.
    pub default_box: [f64; 4],
    point: NetPoint,
    locate: Option<NetLocate>,
    det: Option<NetDet>,
}

impl fmt::Debug for CurveNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveNet")
            .field("label", &self.label)
            .field("family", &self.family)
            .field("u", &self.u_name)
            .field("v", &self.v_name)
            .field("default_box", &self.default_box)
            .finish()
    }
}

fn finite(p: [f64; 2]) -> Result<[f64; 2]> {
    if p[0].is_finite() && p[1].is_finite() {
        Ok(p)
    } else {
        Err(Error::domain("slip-line net", "non-finite point"))
    }
}

fn polar_xy(ln_r: f64, phi: f64) -> Result<[f64; 2]> {
    let r = ln_r.exp();
    finite([r * phi.cos(), r * phi.sin()])
}

/// Richardson-extrapolated central difference of a vector-valued map.
fn fd2(f: impl Fn(f64) -> Result<[f64; 2]>, t: f64) -> Result<[f64; 2]> {
    let h = NET_STEP * t.abs().max(1.0);
    let d = |h: f64| -> Result<[f64; 2]> {
        let (a, b) = (f(t + h)?, f(t - h)?);
        Ok([(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)])
    };
    let (c, fine) = (d(h)?, d(0.5 * h)?);
    Ok([(4.0 * fine[0] - c[0]) / 3.0, (4.0 * fine[1] - c[1]) / 3.0])
}

impl CurveNet {
    pub fn new(
        label: impl Into<String>,
        family: Family,
        names: (&'static str, &'static str),
        default_box: [f64; 4],
        point: impl Fn(f64, f64) -> Result<[f64; 2]> + Send + Sync + 'static,
    ) -> Self {
        CurveNet {
            label: label.into(),
            family,
            u_name: names.0,
            v_name: names.1,
            default_box,
            point: Arc::new(point),
            locate: None,
            det: None,
        }
    }

    pub fn with_locate(mut self, f: impl Fn(&Point2, &StressState) -> Result<[f64; 2]> + Send + Sync + 'static) -> Self {
        self.locate = Some(Arc::new(f));
        self
    }

    pub fn with_det(mut self, f: impl Fn(f64, f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        self.det = Some(Arc::new(f));
        self
    }

    /// Cartesian point of curve `u` at parameter `v`.
    pub fn point(&self, u: f64, v: f64) -> Result<[f64; 2]> {
        (self.point)(u, v)
    }

    /// `(u, v)` of a field point, given the state there.
    pub fn locate(&self, p: &Point2, s: &StressState) -> Result<[f64; 2]> {
        match &self.locate {
            Some(f) => f(p, s),
            None => Err(Error::UnsupportedField { field: self.label.clone(), what: "locating plane points".into() }),
        }
    }

    /// `dP/du`.
    pub fn d_du(&self, u: f64, v: f64) -> Result<[f64; 2]> {
        fd2(|t| self.point(t, v), u)
    }

    /// `dP/dv`, the tangent of the curve `u`.
    pub fn tangent(&self, u: f64, v: f64) -> Result<[f64; 2]> {
        fd2(|t| self.point(u, t), v)
    }

    /// `det d(x, y)/d(u, v)`; its zero set holds the envelope and the cusps.
    pub fn jacobian_det(&self, u: f64, v: f64) -> Result<f64> {
        if let Some(d) = &self.det {
            return d(u, v);
        }
        let (a, b) = (self.d_du(u, v)?, self.tangent(u, v)?);
        Ok(a[0] * b[1] - a[1] * b[0])
    }

    pub fn curve(&self, u: f64) -> ClosedCurve {
        ClosedCurve { net: self.clone(), u }
    }
}

/// One member of a closed-form family.
#[derive(Debug, Clone)]
pub struct ClosedCurve {
    pub net: CurveNet,
    pub u: f64,
}

impl ClosedCurve {
    pub fn point(&self, v: f64) -> Result<[f64; 2]> {
        self.net.point(self.u, v)
    }

    /// `n + 1` equally spaced samples in `v`; points that fail to evaluate are skipped.
    pub fn sample(&self, v0: f64, v1: f64, n: usize) -> Vec<(f64, [f64; 2])> {
        let n = n.max(1);
        (0..=n)
            .filter_map(|i| {
                let v = v0 + (v1 - v0) * i as f64 / n as f64;
                self.point(v).ok().map(|p| (v, p))
            })
            .collect()
    }
}

/// Cycloids `x = (h/m)(-+2 theta - sin 2 theta) + u`, `y = (h/m) cos 2 theta`.
pub fn prandtl_net(f: &Prandtl, family: Family) -> Result<CurveNet> {
    if f.m == 0.0 {
        return Err(Error::UnsupportedField { field: "prandtl".into(), what: "curved slip lines when m = 0".into() });
    }
    let l = f.h / f.m;
    let sgn = match family {
        Family::First => -1.0,
        Family::Second => 1.0,
    };
    let x_of = move |t: f64| l * (sgn * 2.0 * t - (2.0 * t).sin());
    Ok(CurveNet::new("prandtl cycloids", family, ("x0", "theta"), [-2.0, 2.0, -FRAC_PI_2 - 0.2, 0.2], move |u, t| {
        finite([x_of(t) + u, l * (2.0 * t).cos()])
    })
    .with_locate(move |p, s| Ok([p.xy()[0] - x_of(s.theta), s.theta])))
}

/// Epicycloids and hypocycloids between the circles, parameterized by the polar
/// slip angle `g`: `r = sqrt(C1/(cos 2g - C2))`,
/// `phi = u - g + w atan2(q sin g, cos g)` with `q = sqrt((C2 + 1)/(C2 - 1))`,
/// `w = 1/q` (first family) or `q` (second family).
pub fn two_circles_net(f: &NadaiTwoCircles, family: Family) -> Result<CurveNet> {
    let (c1, c2) = (f.c1(), f.c2());
    let q = ((c2 + 1.0) / (c2 - 1.0)).sqrt();
    let w = match family {
        Family::First => 1.0 / q,
        Family::Second => q,
    };
    let shift = move |g: f64| -g + w * (q * g.sin()).atan2(g.cos());
    let field = *f;
    Ok(CurveNet::new("two-circle cycloids", family, ("phi0", "g"), [-PI, PI, -0.3, FRAC_PI_2 + 0.3], move |u, g| {
        let r2 = c1 / ((2.0 * g).cos() - c2);
        polar_xy(0.5 * r2.ln(), u + shift(g))
    })
    .with_locate(move |p, _| {
        let [r, phi] = p.to_polar()?.coords();
        let g = field.g(r);
        Ok([phi - shift(g), g])
    }))
}

/// Channel slip lines `r = e^u exp(-+theta/c) / sqrt|c + sin 2 psi|` along the
/// fan `theta = theta(psi)`, `phi = theta - psi`.
pub fn channel_net(ch: &NadaiChannel, family: Family) -> Result<CurveNet> {
    let sgn = match family {
        Family::First => 1.0,
        Family::Second => -1.0,
    };
    let c = ch.c;
    let (lo, hi) = ch.psi_bracket();
    let chan = *ch;
    let tail = move |theta: f64, psi: f64| -sgn * theta / c - 0.5 * (c + (2.0 * psi).sin()).abs().ln();
    Ok(CurveNet::new("channel slip lines", family, ("ln_r0", "psi"), [-1.0, 1.0, lo - 0.3, hi + 0.3], move |u, psi| {
        let theta = chan.theta_of_psi(psi);
        polar_xy(u + tail(theta, psi), theta - psi)
    })
    .with_locate(move |p, s| {
        let [r, phi] = p.to_polar()?.coords();
        let psi = s.theta - phi;
        Ok([r.ln() - tail(s.theta, psi), psi])
    }))
}

/// Spiral slip lines: `phi = u + Phi_family(g)`, `ln r = alpha phi + L(g) + c0`.
pub fn spiral_net(sp: &Spiral, family: Family) -> Result<CurveNet> {
    let (g_lo, g_hi) = sp.branch();
    let a = *sp;
    let b = *sp;
    Ok(CurveNet::new("spiral slip lines", family, ("phi0", "g"), [-PI, PI, g_lo - 0.15, g_hi + 0.15], move |u, g| {
        let phi = u + a.family_phi(family, g)?;
        polar_xy(a.alpha * phi + a.ln_lambda_offset(g)? + a.lambda_const, phi)
    })
    .with_locate(move |p, s| {
        let phi = p.to_polar()?.coords()[1];
        let g = s.theta - phi;
        Ok([phi - b.family_phi(family, g)?, g])
    }))
}

/// Simple-wave slip lines. With `n = (cos theta, sin theta)`, `t = (-sin theta, cos theta)`,
/// `m = (sin theta, -cos theta)` and `F' = Phi`:
/// even order, straight lines `Phi n + tau t` (second family) and curves
/// `Phi n - (F + u) t` (first family); odd order, straight lines `Phi m + tau n`
/// (first family) and curves `Phi m - (F + u) n` (second family).
pub fn simple_wave_net(w: &SimpleWave, family: Family) -> Result<CurveNet> {
    let even = w.is_even();
    let straight = (family == Family::Second) == even;
    let basis = move |t: f64| {
        let (s, c) = t.sin_cos();
        // (normal of the straight lines, their direction)
        if even {
            ([c, s], [-s, c])
        } else {
            ([s, -c], [c, s])
        }
    };
    let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
    let phi = w.phi.clone();
    if straight {
        let net = CurveNet::new("simple-wave lines", family, ("theta", "tau"), [-1.0, 1.0, -2.0, 2.0], move |t, tau| {
            let (nrm, dir) = basis(t);
            let f = phi.eval(t);
            finite([f * nrm[0] + tau * dir[0], f * nrm[1] + tau * dir[1]])
        })
        .with_locate(move |p, s| Ok([s.theta, dot(p.xy(), basis(s.theta).1)]));
        return Ok(net);
    }
    let big_f = {
        let phi = phi.clone();
        move |t: f64| phi.integral(0.0, t)
    };
    let big_f2 = big_f.clone();
    Ok(CurveNet::new("simple-wave curves", family, ("c", "theta"), [-2.0, 2.0, -1.0, 1.0], move |u, t| {
        let (nrm, dir) = basis(t);
        let (f, lift) = (phi.eval(t), big_f(t)? + u);
        finite([f * nrm[0] - lift * dir[0], f * nrm[1] - lift * dir[1]])
    })
    .with_locate(move |p, s| {
        let dir = basis(s.theta).1;
        Ok([-dot(p.xy(), dir) - big_f2(s.theta)?, s.theta])
    }))
}

/// Characteristic net of the Revuzhenko field: first-family lines keep `xi`
/// fixed and run along `eta`, second-family lines the reverse.
pub fn revuzhenko_net(sign: RevuzhenkoSign, family: Family) -> CurveNet {
    let f = Revuzhenko::new(sign);
    let coords = move |u: f64, v: f64| match family {
        Family::First => CharCoords::new(u, v),
        Family::Second => CharCoords::new(v, u),
    };
    let window = match sign {
        RevuzhenkoSign::Lower => [-0.45, -0.2, 0.7, 3.0],
        RevuzhenkoSign::Upper => [0.2, 0.45, 0.7, 3.0],
    };
    let (u_name, v_name, default_box) = match family {
        Family::First => ("xi", "eta", window),
        Family::Second => ("eta", "xi", [window[2], window[3], window[0], window[1]]),
    };
    CurveNet::new(format!("{} net", f.name()), family, (u_name, v_name), default_box, move |u, v| {
        let m = f.map(coords(u, v))?;
        polar_xy(m.r.ln(), m.phi)
    })
    .with_det(move |u, v| {
        let c = coords(u, v);
        let (m, j) = (f.map(c)?, f.jacobian(c)?);
        let det = m.r * (j[0][0] * j[1][1] - j[0][1] * j[1][0]);
        Ok(match family {
            Family::First => det,
            Family::Second => -det,
        })
    })
}

/// Curve `curve_const` of the closed-form `family` of a catalog solution.
pub fn closed_form_family(name: &str, params: &Value, family: Family, curve_const: f64) -> Result<ClosedCurve> {
    if name.starts_with("revuzhenko") {
        let sign = match name {
            "revuzhenko_lower" => RevuzhenkoSign::Lower,
            "revuzhenko_upper" => RevuzhenkoSign::Upper,
            _ => {
                let f = crate::catalog::build_characteristic(name, params)?;
                if f.name().ends_with("lower") {
                    RevuzhenkoSign::Lower
                } else {
                    RevuzhenkoSign::Upper
                }
            }
        };
        return Ok(revuzhenko_net(sign, family).curve(curve_const));
    }
    Ok(build(name, params)?.slip_net(family)?.curve(curve_const))
}

/// Largest distance between the vertices of a traced line and the closed-form
/// curve through its first vertex, matched by the net parameter `v`.
pub fn closed_form_deviation(net: &CurveNet, line: &Polyline) -> Result<f64> {
    let pts = line.points();
    let states = line.states();
    let (Some(p0), Some(s0)) = (pts.first(), states.first()) else {
        return Ok(0.0);
    };
    let u0 = net.locate(p0, s0)?[0];
    let mut worst = 0.0f64;
    for (p, s) in pts.iter().zip(&states) {
        let v = net.locate(p, s)?[1];
        let q = net.point(u0, v)?;
        let [x, y] = p.xy();
        worst = worst.max((q[0] - x).hypot(q[1] - y));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristics::{trace_slipline, TraceOptions};

    #[test]
    fn prandtl_cycloid_closed_form() {
        let f = Prandtl::default();
        let c = closed_form_family("prandtl", &Value::Null, Family::First, 0.0).unwrap();
        // theta = -pi/4 is the mid-plane: x = pi/2 + 1.
        let p = c.point(-std::f64::consts::FRAC_PI_4).unwrap();
        assert!((p[0] - (FRAC_PI_2 + 1.0)).abs() < 1e-15 && p[1].abs() < 1e-15);
        let net = prandtl_net(&f, Family::First).unwrap();
        let line = trace_slipline(&f, &Point2::cartesian(0.1, -0.3), Family::First, &TraceOptions::default()).unwrap();
        assert!(closed_form_deviation(&net, &line).unwrap() < 1e-8);
    }

    #[test]
    fn revuzhenko_net_is_a_hencky_net() {
        // Along first-family lines (xi fixed) the tangent has slope tan theta.
        for sign in [RevuzhenkoSign::Upper, RevuzhenkoSign::Lower] {
            let net = revuzhenko_net(sign, Family::First);
            let f = Revuzhenko::new(sign);
            for (xi, eta) in [(0.3, 1.2), (-0.4, 0.8), (0.7, -1.5)] {
                let t = net.tangent(xi, eta).unwrap();
                let th = f.map(CharCoords::new(xi, eta)).unwrap().theta;
                let cross = t[0] * th.sin() - t[1] * th.cos();
                assert!(cross.abs() < 1e-8 * t[0].hypot(t[1]).max(1.0), "{cross}");
            }
        }
    }
}
