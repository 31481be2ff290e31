//! Slip lines: direction fields, RK4 tracing, Riemann invariants, closed-form
//! families and envelopes.

mod envelope;
mod nets;

use serde::{Deserialize, Serialize};

use crate::catalog::{CharCoords, StressField};
use crate::error::{Error, Result};
use crate::numeric::{fmt17, rk4_step};
use crate::plane::{Frame, Point2, StressState};

pub use envelope::{
    envelope_closed_form, envelope_numeric, max_tangency_angle, revuzhenko_root, ClosedEnvelope, Construction, EnvelopeCurve,
    EnvelopeKind, EnvelopeSample, ENVELOPE_GRID,
};
pub use nets::{
    channel_net, closed_form_deviation, closed_form_family, prandtl_net, revuzhenko_net, simple_wave_net,
    spiral_net, two_circles_net, ClosedCurve, CurveNet,
};
pub(crate) use envelope::{channel_envelopes, simple_wave_envelopes, spiral_envelopes, two_circles_envelopes};

/// Slip-line family. `First` has slope `tan theta`, `Second` slope `-cot theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    First,
    Second,
}

impl Family {
    pub fn other(self) -> Family {
        match self {
            Family::First => Family::Second,
            Family::Second => Family::First,
        }
    }

    /// `1` or `2`, as used on the command line.
    pub fn from_index(i: u8) -> Result<Family> {
        match i {
            1 => Ok(Family::First),
            2 => Ok(Family::Second),
            _ => Err(Error::param("family", format!("expected 1 or 2, got {i}"))),
        }
    }
}

/// Unit tangent of a slip line in cartesian components, `theta` cartesian.
pub fn slip_direction(theta: f64, family: Family) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    match family {
        Family::First => [c, s],
        Family::Second => [s, -c],
    }
}

/// Unit tangent in the local polar basis `(e_r, e_phi)` given the polar slip
/// angle `theta_p = theta - phi`.
pub fn slip_direction_polar(theta_p: f64, family: Family) -> [f64; 2] {
    slip_direction(theta_p, family)
}

/// `xi = sigma/2k - theta` (constant along first-family lines) and
/// `eta = sigma/2k + theta` (constant along second-family lines).
pub fn riemann_invariants(s: &StressState) -> CharCoords {
    let m = s.sigma / (2.0 * s.k);
    CharCoords::new(m - s.theta, m + s.theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Fixed arc-length step of the RK4 integrator.
    pub step: f64,
    pub max_arclen: f64,
    /// Tracing stops once `boundary_distance` drops below this.
    pub margin: f64,
    /// Trace against the default orientation.
    pub backward: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { step: 1e-3, max_arclen: 1.0, margin: 1e-2, backward: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxArcLength,
    /// Left the domain or came within the margin of a singular boundary.
    Boundary,
    /// The direction field could not be evaluated inside an RK4 step.
    Singular,
}

/// One vertex of a traced slip line; `a`, `b` are native coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub y: f64,
    pub sigma: f64,
    pub theta: f64,
    pub xi: f64,
    pub eta: f64,
}

impl Vertex {
    fn new(s: f64, p: &Point2, st: &StressState) -> Vertex {
        let [a, b] = p.coords();
        let [x, y] = p.xy();
        let inv = riemann_invariants(st);
        Vertex { s, a, b, x, y, sigma: st.sigma, theta: st.theta, xi: inv.xi, eta: inv.eta }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub field: String,
    pub family: Family,
    pub frame: Frame,
    pub k: f64,
    pub vertices: Vec<Vertex>,
    pub stop: StopReason,
}

pub const POLYLINE_CSV_HEADER: &str = "s,x,y,sigma,theta,xi,eta";

impl Polyline {
    pub fn arclength(&self) -> f64 {
        self.vertices.last().map_or(0.0, |v| v.s)
    }

    /// Vertices as points in the native frame.
    pub fn points(&self) -> Vec<Point2> {
        self.vertices
            .iter()
            .map(|v| Point2::new(self.frame, v.a, v.b).expect("traced vertices are valid points"))
            .collect()
    }

    pub fn states(&self) -> Vec<StressState> {
        self.vertices.iter().map(|v| StressState { sigma: v.sigma, theta: v.theta, k: self.k }).collect()
    }

    /// Largest change of the conserved invariant (`xi` on first-family lines,
    /// `eta` on second-family lines) divided by the traced length.
    pub fn riemann_drift(&self) -> f64 {
        let pick = |v: &Vertex| match self.family {
            Family::First => v.xi,
            Family::Second => v.eta,
        };
        let (Some(v0), len) = (self.vertices.first(), self.arclength()) else {
            return 0.0;
        };
        if len == 0.0 {
            return 0.0;
        }
        let i0 = pick(v0);
        self.vertices.iter().map(|v| (pick(v) - i0).abs()).fold(0.0, f64::max) / len
    }

    /// Rows `s,x,y,sigma,theta,xi,eta`, optionally prefixed by a curve id.
    pub fn write_csv_rows(&self, curve_id: Option<usize>, out: &mut String) {
        for v in &self.vertices {
            if let Some(id) = curve_id {
                out.push_str(&id.to_string());
                out.push(',');
            }
            let cols = [v.s, v.x, v.y, v.sigma, v.theta, v.xi, v.eta].map(fmt17);
            out.push_str(&cols.join(","));
            out.push('\n');
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(POLYLINE_CSV_HEADER);
        out.push('\n');
        self.write_csv_rows(None, &mut out);
        out
    }
}

fn native_velocity(frame: Frame, y: &[f64; 2], d: [f64; 2]) -> [f64; 2] {
    match frame {
        Frame::Cartesian => d,
        Frame::Polar => {
            let (s, c) = y[1].sin_cos();
            [d[0] * c + d[1] * s, (-d[0] * s + d[1] * c) / y[0]]
        }
    }
}

fn oriented(theta: f64, family: Family, reference: [f64; 2]) -> [f64; 2] {
    let d = slip_direction(theta, family);
    if d[0] * reference[0] + d[1] * reference[1] < 0.0 {
        [-d[0], -d[1]]
    } else {
        d
    }
}

/// Traces a slip line with classical RK4 at a fixed arc-length step, in the
/// native coordinates of `field`. The line field is oriented continuously
/// from the start; `backward` flips the initial orientation.
pub fn trace_slipline(field: &dyn StressField, start: &Point2, family: Family, opts: &TraceOptions) -> Result<Polyline> {
    if !(opts.step > 0.0) || !opts.step.is_finite() {
        return Err(Error::param("step", format!("must be positive, got {}", opts.step)));
    }
    if !(opts.max_arclen >= 0.0) || !opts.max_arclen.is_finite() {
        return Err(Error::param("max_arclen", format!("must be non-negative, got {}", opts.max_arclen)));
    }
    let frame = field.frame();
    let p0 = start.in_frame(frame).map_err(|_| Error::StartOutsideDomain)?;
    let st0 = field.state(&p0).map_err(|_| Error::StartOutsideDomain)?;
    if field.boundary_distance(&p0) < opts.margin {
        return Err(Error::StartOutsideDomain);
    }
    let mut reference = slip_direction(st0.theta, family);
    if opts.backward {
        reference = [-reference[0], -reference[1]];
    }
    let mut y = p0.coords();
    let mut s = 0.0;
    let mut vertices = vec![Vertex::new(0.0, &p0, &st0)];
    let stop = loop {
        let remaining = opts.max_arclen - s;
        if remaining <= 1e-12 * opts.max_arclen.max(1.0) {
            break StopReason::MaxArcLength;
        }
        let h = opts.step.min(remaining);
        let rhs = |q: &[f64; 2]| -> Option<[f64; 2]> {
            let p = Point2::new(frame, q[0], q[1]).ok()?;
            let st = field.state(&p).ok()?;
            let v = native_velocity(frame, q, oriented(st.theta, family, reference));
            (v[0].is_finite() && v[1].is_finite()).then_some(v)
        };
        let Some(next) = rk4_step(rhs, &y, h) else {
            break StopReason::Singular;
        };
        let Ok(p) = Point2::new(frame, next[0], next[1]) else {
            break StopReason::Boundary;
        };
        let Ok(st) = field.state(&p) else {
            break StopReason::Boundary;
        };
        if field.boundary_distance(&p) < opts.margin {
            break StopReason::Boundary;
        }
        reference = oriented(st.theta, family, reference);
        s += h;
        y = next;
        vertices.push(Vertex::new(s, &p, &st));
    };
    Ok(Polyline { field: field.name().to_string(), family, frame, k: field.k(), vertices, stop })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{NadaiTwoCircles, Prandtl};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn directions() {
        assert_eq!(slip_direction(0.0, Family::First), [1.0, 0.0]);
        let d = slip_direction(0.0, Family::Second);
        assert!(d[0].abs() < 1e-16 && (d[1] + 1.0).abs() < 1e-16);
        for t in [-2.0, -0.3, 0.0, 0.7, 3.0] {
            let (a, b) = (slip_direction(t, Family::First), slip_direction(t, Family::Second));
            assert!((a[0] * b[0] + a[1] * b[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn invariants() {
        let z = riemann_invariants(&StressState { sigma: 0.0, theta: 0.0, k: 0.5 });
        assert_eq!((z.xi, z.eta), (0.0, 0.0));
        let z = riemann_invariants(&StressState { sigma: 1.0, theta: FRAC_PI_4, k: 0.5 });
        assert!((z.xi - (1.0 - FRAC_PI_4)).abs() < 1e-15 && (z.eta - (1.0 + FRAC_PI_4)).abs() < 1e-15);
    }

    #[test]
    fn prandtl_trace_conserves_xi() {
        let f = Prandtl::default();
        let line = trace_slipline(&f, &Point2::cartesian(0.0, 0.2), Family::First, &TraceOptions::default()).unwrap();
        assert!(line.vertices.len() > 100);
        assert!(line.riemann_drift() < 1e-8, "{}", line.riemann_drift());
        for w in line.vertices.windows(2) {
            let ds = ((w[1].x - w[0].x).powi(2) + (w[1].y - w[0].y).powi(2)).sqrt();
            assert!(ds <= 1e-3 + 1e-12);
        }
    }

    #[test]
    fn start_outside_is_rejected() {
        let f = NadaiTwoCircles::new(1.0, 2f64.sqrt(), 0.5).unwrap();
        let r = trace_slipline(&f, &Point2::cartesian(0.5, 0.0), Family::First, &TraceOptions::default());
        assert!(matches!(r, Err(Error::StartOutsideDomain)));
    }

    #[test]
    fn csv_layout() {
        let f = Prandtl::default();
        let opts = TraceOptions { max_arclen: 0.01, ..Default::default() };
        let line = trace_slipline(&f, &Point2::cartesian(0.0, 0.0), Family::Second, &opts).unwrap();
        let csv = line.to_csv();
        let mut rows = csv.lines();
        assert_eq!(rows.next(), Some(POLYLINE_CSV_HEADER));
        assert_eq!(rows.count(), line.vertices.len());
    }
}
