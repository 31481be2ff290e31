//! Envelopes of slip-line families: closed forms and a numeric search for the
//! zero set of the net Jacobian.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::{
    build, build_characteristic, CharCoords, CharacteristicField, NadaiChannel, NadaiTwoCircles, Revuzhenko,
    RevuzhenkoSign, SimpleWave, Spiral, ThetaBracket,
};
use crate::characteristics::{CurveNet, Family};
use crate::error::{Error, Result};
use crate::numeric::{bisect_newton, sign_change_brackets};
use crate::plane::FunctionSpec;

/// Default number of grid lines in each direction of the numeric scan.
pub const ENVELOPE_GRID: usize = 400;
const BISECT_TOL: f64 = 1e-10;
const CUSP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvelopeKind {
    Circle { radius: f64 },
    /// `ln r = alpha phi + offset`.
    LogSpiral { alpha: f64, offset: f64 },
    Ray { phi: f64 },
    /// `eta = (s + root sqrt(1 - 16 xi^4)) / (4 xi)`, `s = +-1` the field sign;
    /// `mirrored` swaps the roles of `xi` and `eta`.
    RevuzhenkoRoot { sign: RevuzhenkoSign, root: f64, mirrored: bool },
    /// Edge of regression of the straight lines, `Phi n + Phi' t`.
    SimpleWaveEdge { even: bool },
}

type EnvelopePoint = Arc<dyn Fn(f64) -> Result<[f64; 2]> + Send + Sync>;

/// A documented envelope as a parametric curve.
#[derive(Clone)]
pub struct ClosedEnvelope {
    pub label: String,
    /// The family the curve envelopes.
    pub family: Family,
    pub kind: EnvelopeKind,
    pub range: (f64, f64),
    point: EnvelopePoint,
}

impl fmt::Debug for ClosedEnvelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedEnvelope")
            .field("label", &self.label)
            .field("family", &self.family)
            .field("kind", &self.kind)
            .field("range", &self.range)
            .finish()
    }
}

impl ClosedEnvelope {
    fn new(
        label: impl Into<String>,
        family: Family,
        kind: EnvelopeKind,
        range: (f64, f64),
        point: impl Fn(f64) -> Result<[f64; 2]> + Send + Sync + 'static,
    ) -> Self {
        ClosedEnvelope { label: label.into(), family, kind, range, point: Arc::new(point) }
    }

    pub fn point(&self, t: f64) -> Result<[f64; 2]> {
        (self.point)(t)
    }

    /// `n + 1` equally spaced samples over `range`; failures are skipped.
    pub fn to_curve(&self, n: usize) -> EnvelopeCurve {
        let n = n.max(1);
        let (t0, t1) = self.range;
        let mut branches: Vec<Vec<EnvelopeSample>> = vec![Vec::new()];
        for i in 0..=n {
            let t = t0 + (t1 - t0) * i as f64 / n as f64;
            match self.point(t) {
                Ok([x, y]) => branches.last_mut().expect("non-empty").push(EnvelopeSample { u: t, v: 0.0, x, y }),
                Err(_) => {
                    if !branches.last().expect("non-empty").is_empty() {
                        branches.push(Vec::new());
                    }
                }
            }
        }
        branches.retain(|b| !b.is_empty());
        EnvelopeCurve {
            label: self.label.clone(),
            family: self.family,
            construction: Construction::ClosedForm,
            branches,
            cusps: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    ClosedForm,
    Numeric,
}

/// A point of an envelope. `(u, v)` are net coordinates for numeric curves;
/// closed-form curves store their parameter in `u` and leave `v` at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSample {
    pub u: f64,
    pub v: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCurve {
    pub label: String,
    pub family: Family,
    pub construction: Construction,
    /// Connected pieces, each ordered along the curve.
    pub branches: Vec<Vec<EnvelopeSample>>,
    /// Zeros of the Jacobian where the slip lines have cusps instead of touching.
    pub cusps: Vec<EnvelopeSample>,
}

impl EnvelopeCurve {
    pub fn samples(&self) -> impl Iterator<Item = &EnvelopeSample> {
        self.branches.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.branches.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Locates the zero set of `det d(x, y)/d(u, v)` by scanning every column
/// `u = const` of a `grid x grid` lattice for sign changes in `v` and bisecting
/// to `1e-10`. Zeros where the slip line itself has a vanishing tangent are
/// reported as cusps; the rest form the envelope.
pub fn envelope_numeric(net: &CurveNet, bbox: Option<[f64; 4]>, grid: usize) -> Result<EnvelopeCurve> {
    let [u0, u1, v0, v1] = bbox.unwrap_or(net.default_box);
    if !(u0 < u1 && v0 < v1) {
        return Err(Error::param("region", "box must have positive extent"));
    }
    let grid = grid.max(2);
    let columns: Vec<Vec<(EnvelopeSample, bool)>> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let u = u0 + (u1 - u0) * i as f64 / (grid - 1) as f64;
            let det = |v: f64| net.jacobian_det(u, v).unwrap_or(f64::NAN);
            let mut roots = Vec::new();
            for (a, b) in sign_change_brackets(det, v0, v1, grid) {
                let Ok(v) = (if a == b { Ok(a) } else { bisect_newton(det, a, b, BISECT_TOL) }) else {
                    continue;
                };
                let (Ok(p), Ok(du), Ok(dv)) = (net.point(u, v), net.d_du(u, v), net.tangent(u, v)) else {
                    continue;
                };
                let (ndu, ndv) = (du[0].hypot(du[1]), dv[0].hypot(dv[1]));
                // Sign changes across poles of the determinant are not zeros.
                if !(det(v).abs() <= CUSP_TOL * (1.0 + ndu * ndv)) {
                    continue;
                }
                let cusp = ndv <= CUSP_TOL * p[0].hypot(p[1]).max(1.0);
                roots.push((EnvelopeSample { u, v, x: p[0], y: p[1] }, cusp));
            }
            roots
        })
        .collect();

    let link = 0.05 * (v1 - v0);
    let mut branches: Vec<(usize, Vec<EnvelopeSample>)> = Vec::new();
    let mut cusps = Vec::new();
    for (i, col) in columns.into_iter().enumerate() {
        let mut taken = vec![false; branches.len()];
        for (s, cusp) in col {
            if cusp {
                cusps.push(s);
                continue;
            }
            let best = branches
                .iter()
                .enumerate()
                .filter(|(j, (last, b))| !taken[*j] && *last + 1 == i && (b.last().expect("non-empty").v - s.v).abs() <= link)
                .min_by(|a, b| {
                    let da = (a.1 .1.last().expect("non-empty").v - s.v).abs();
                    let db = (b.1 .1.last().expect("non-empty").v - s.v).abs();
                    da.total_cmp(&db)
                })
                .map(|(j, _)| j);
            match best {
                Some(j) => {
                    taken[j] = true;
                    branches[j].0 = i;
                    branches[j].1.push(s);
                }
                None => branches.push((i, vec![s])),
            }
        }
    }
    if branches.is_empty() && cusps.is_empty() {
        return Err(Error::NoSignChange);
    }
    Ok(EnvelopeCurve {
        label: net.label.clone(),
        family: net.family,
        construction: Construction::Numeric,
        branches: branches.into_iter().map(|(_, b)| b).collect(),
        cusps,
    })
}

/// Largest angle (radians) between the envelope tangent, from central
/// differences of neighbouring samples, and the slip-line direction supplied
/// by `direction`. `None` when no interior sample has a direction.
pub fn max_tangency_angle(curve: &EnvelopeCurve, direction: impl Fn(&EnvelopeSample) -> Option<[f64; 2]>) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for b in &curve.branches {
        for w in b.windows(3) {
            let t = [w[2].x - w[0].x, w[2].y - w[0].y];
            let nt = t[0].hypot(t[1]);
            let Some(d) = direction(&w[1]) else { continue };
            let nd = d[0].hypot(d[1]);
            if nt == 0.0 || nd == 0.0 {
                continue;
            }
            let sin = ((t[0] * d[1] - t[1] * d[0]) / (nt * nd)).abs().min(1.0);
            let angle = sin.asin();
            worst = Some(worst.map_or(angle, |m: f64| m.max(angle)));
        }
    }
    worst
}

fn polar_point(r: f64, phi: f64) -> [f64; 2] {
    [r * phi.cos(), r * phi.sin()]
}

/// Circles `r = a` (first family) and `r = b` (second family).
pub(crate) fn two_circles_envelopes(f: &NadaiTwoCircles) -> Vec<ClosedEnvelope> {
    [(Family::First, f.a), (Family::Second, f.b)]
        .into_iter()
        .map(|(fam, r)| {
            ClosedEnvelope::new(format!("circle r = {r}"), fam, EnvelopeKind::Circle { radius: r }, (-PI, PI), move |phi| {
                Ok(polar_point(r, phi))
            })
        })
        .collect()
}

/// The two logarithmic spirals `ln r = alpha phi + L(g_end) + c0`.
pub(crate) fn spiral_envelopes(sp: &Spiral) -> Result<Vec<ClosedEnvelope>> {
    [Family::First, Family::Second]
        .into_iter()
        .map(|fam| {
            let (_, offset) = sp.envelope(fam)?;
            let alpha = sp.alpha;
            Ok(ClosedEnvelope::new(
                format!("log spiral ln r = {alpha} phi + {offset}"),
                fam,
                EnvelopeKind::LogSpiral { alpha, offset },
                (-PI, PI),
                move |phi| Ok(polar_point((alpha * phi + offset).exp(), phi)),
            ))
        })
        .collect()
}

/// The walls of a channel with `c^2 > 1`: first-family lines touch the ray
/// `psi = 0`, second-family lines the ray `psi = +-pi/2`.
pub(crate) fn channel_envelopes(ch: &NadaiChannel) -> Result<Vec<ClosedEnvelope>> {
    if !ch.has_walls() {
        return Err(Error::NoEnvelope(format!("channel with c = {}: c^2 < 1 gives no envelope", ch.c)));
    }
    let (lo, hi) = ch.psi_bracket();
    let other = if lo == 0.0 { hi } else { lo };
    Ok([(Family::First, 0.0), (Family::Second, other)]
        .into_iter()
        .map(|(fam, psi)| {
            let phi = ch.phi_of_psi(psi);
            ClosedEnvelope::new(format!("wall phi = {phi}"), fam, EnvelopeKind::Ray { phi }, (1e-3, 5.0), move |r| {
                Ok(polar_point(r, phi))
            })
        })
        .collect())
}

/// Edge of regression of the straight slip lines of a simple wave.
pub(crate) fn simple_wave_envelopes(w: &SimpleWave) -> Result<Vec<ClosedEnvelope>> {
    if matches!(w.phi.spec(), Some(FunctionSpec::Zero)) {
        return Err(Error::NoEnvelope("centred fan: the straight lines meet at the centre".into()));
    }
    let even = w.is_even();
    let family = if even { Family::Second } else { Family::First };
    let range = match w.bracket {
        ThetaBracket::Fixed { lo, hi } => (lo, hi),
        ThetaBracket::AroundPolarAngle { .. } => (-1.0, 1.0),
    };
    let phi = w.phi.clone();
    Ok(vec![ClosedEnvelope::new(
        "edge of regression",
        family,
        EnvelopeKind::SimpleWaveEdge { even },
        range,
        move |t| {
            let (s, c) = t.sin_cos();
            let (f, df) = (phi.eval(t), phi.derivative(t));
            Ok(if even { [f * c - df * s, f * s + df * c] } else { [f * s + df * c, -f * c + df * s] })
        },
    )])
}

/// `eta` on the Jacobian zero set for a given `xi`: `(s + root sqrt(1 - 16 xi^4)) / (4 xi)`.
pub fn revuzhenko_root(sign: RevuzhenkoSign, root: f64, xi: f64) -> Option<f64> {
    let disc = 1.0 - 16.0 * xi.powi(4);
    (xi != 0.0 && disc >= 0.0).then(|| (sign.value() + root * disc.sqrt()) / (4.0 * xi))
}

fn revuzhenko_envelopes(sign: RevuzhenkoSign) -> Vec<ClosedEnvelope> {
    let mut out = Vec::new();
    for mirrored in [false, true] {
        for root in [-1.0, 1.0] {
            let f = Revuzhenko::new(sign);
            let family = if mirrored { Family::Second } else { Family::First };
            out.push(ClosedEnvelope::new(
                format!("{} envelope ({}, root {root})", f.name(), if mirrored { "xi(eta)" } else { "eta(xi)" }),
                family,
                EnvelopeKind::RevuzhenkoRoot { sign, root, mirrored },
                (-0.5, 0.5),
                move |t| {
                    let other = revuzhenko_root(sign, root, t)
                        .ok_or_else(|| Error::domain("revuzhenko envelope", format!("no root at {t}")))?;
                    let c = if mirrored { CharCoords::new(other, t) } else { CharCoords::new(t, other) };
                    let m = f.map(c)?;
                    Ok(polar_point(m.r, m.phi))
                },
            ));
        }
    }
    out
}

/// The documented envelopes of a catalog solution.
pub fn envelope_closed_form(name: &str, params: &Value) -> Result<Vec<ClosedEnvelope>> {
    if name.starts_with("revuzhenko") {
        let f = build_characteristic(name, params)?;
        let sign = if f.name().ends_with("lower") { RevuzhenkoSign::Lower } else { RevuzhenkoSign::Upper };
        return Ok(revuzhenko_envelopes(sign));
    }
    build(name, params)?.closed_envelopes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristics::revuzhenko_net;
    use serde_json::json;

    #[test]
    fn revuzhenko_root_example() {
        let eta = revuzhenko_root(RevuzhenkoSign::Lower, 1.0, 0.5).unwrap();
        assert!((eta + 0.5).abs() < 1e-15);
        let (xi, q) = (0.5, 0.5);
        assert!((2.0 * xi + eta / q).abs() < 1e-15);
    }

    #[test]
    fn closed_forms() {
        let env = envelope_closed_form("nadai_two_circles", &json!({"a": 1.0})).unwrap();
        assert_eq!(env.len(), 2);
        let r: Vec<f64> = env.iter().map(|e| e.point(0.3).unwrap()).map(|p| p[0].hypot(p[1])).collect();
        assert!((r[0] - 1.0).abs() < 1e-15 && (r[1] - 2f64.sqrt()).abs() < 1e-15);
        let sw = envelope_closed_form("spiral_2", &json!({"C": 1.0})).unwrap();
        // r = C sqrt 2 e^(phi - pi/4): at theta = 0 the point is (C, C).
        let p = sw[0].point(0.0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && (p[1] - 1.0).abs() < 1e-15);
        assert!(matches!(
            envelope_closed_form("nadai_channel", &json!({"c": 0.5})),
            Err(Error::NoEnvelope(_))
        ));
    }

    #[test]
    fn revuzhenko_numeric_envelope_small_grid() {
        let net = revuzhenko_net(RevuzhenkoSign::Lower, Family::First);
        let env = envelope_numeric(&net, None, 60).unwrap();
        assert_eq!(env.branches.len(), 1);
        for s in env.samples() {
            let eta = revuzhenko_root(RevuzhenkoSign::Lower, -1.0, s.u).unwrap();
            assert!((s.v - eta).abs() < 1e-8, "{} vs {}", s.v, eta);
        }
    }
}
