//! The subcommands. Each one builds its whole output in memory, in a fixed
//! order, and writes it once.

use rayon::prelude::*;
use serde_json::{json, Value};
use slipline_core::catalog::{
    build, build_characteristic, CharCoords, CharacteristicField, RevuzhenkoSign, StressField,
};
use slipline_core::characteristics::{
    envelope_closed_form, envelope_numeric, revuzhenko_net, trace_slipline, EnvelopeCurve, Family, Polyline,
    TraceOptions, ENVELOPE_GRID,
};
use slipline_core::plane::{levy_to_components, Point2, StressState};
use slipline_core::residuals::Region;
use slipline_core::velocity::{
    build_velocity, dissipation_at, dissipation_sign_ok, trace_streamline, StreamOptions, StreamVertex, VelocityField,
    VELOCITY_FIELDS,
};
use slipline_core::verify::{default_region, revuzhenko_box, verify_all, verify_solution, VerifyConfig};
use slipline_core::Error;

use crate::output::{csv_row, emit, svg, Path2};
use crate::{families, parse_params, parse_region, CliResult, Common, Failure, Format, Method, VerifyArgs};

const SAMPLE_HEADER: &str = "x,y,sigma,theta,sigma_x,sigma_y,tau_xy,xi,eta";
const SLIPLINE_HEADER: &str = "curve_id,s,x,y,sigma,theta,xi,eta,family";
const ENVELOPE_HEADER: &str = "curve_id,s,x,y,u,v,family";
const STREAMLINE_HEADER: &str = "curve_id,s,x,y,u,v,D,diss_ok";
const VELOCITY_HEADER: &str = "x,y,u,v,D,diss_ok";

/// Samples along each closed-form characteristic curve.
const CHAR_CURVE_SAMPLES: usize = 400;

/// A stress solution in either of its two parameterizations.
enum Target {
    Plane(Box<dyn StressField>),
    Characteristic(Box<dyn CharacteristicField>, RevuzhenkoSign),
}

fn target(name: &str, params: &Value) -> CliResult<Target> {
    if VELOCITY_FIELDS.contains(&name) {
        return Err(Failure::Config(format!("`{name}` is a velocity field; use `streamlines` or `velocity`")));
    }
    if name.starts_with("revuzhenko") {
        let f = build_characteristic(name, params)?;
        let sign = if f.name().ends_with("lower") { RevuzhenkoSign::Lower } else { RevuzhenkoSign::Upper };
        return Ok(Target::Characteristic(f, sign));
    }
    Ok(Target::Plane(build(name, params)?))
}

fn velocity_field(name: &str, params: &Value) -> CliResult<Box<dyn VelocityField>> {
    if !VELOCITY_FIELDS.contains(&name) {
        return Err(Failure::Config(format!(
            "`{name}` is not a velocity field; expected one of {}",
            VELOCITY_FIELDS.join(", ")
        )));
    }
    Ok(build_velocity(name, params)?)
}

fn velocity_region(name: &str) -> Region {
    if name == "simple_wave_velocity" {
        Region::cartesian(-3.0, 3.0, -3.0, 3.0)
    } else {
        default_region(name)
    }
}

fn family_index(f: Family) -> f64 {
    match f {
        Family::First => 1.0,
        Family::Second => 2.0,
    }
}

fn family_class(f: Family) -> &'static str {
    match f {
        Family::First => "family-1",
        Family::Second => "family-2",
    }
}

/// `n` seeds spread over the lattice points of `region` that `accept` admits.
fn seeds(region: Region, n: usize, accept: impl Fn(&Point2) -> bool) -> Vec<Point2> {
    let side = 4 * ((n as f64).sqrt().ceil() as usize).max(2);
    let inside: Vec<Point2> = region
        .lattice(side)
        .into_iter()
        .filter_map(|q| Point2::new(region.frame, q[0], q[1]).ok())
        .filter(|p| accept(p))
        .collect();
    if inside.len() <= n {
        return inside;
    }
    (0..n).map(|i| inside[(2 * i + 1) * inside.len() / (2 * n)]).collect()
}

fn no_format(cmd: &str, f: Format) -> Failure {
    Failure::Config(format!("`{cmd}` does not support --format {f:?}").to_lowercase())
}

fn to_json(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s.into_bytes()
}

fn sample_row(p: [f64; 2], s: &StressState) -> [f64; 9] {
    let fs = levy_to_components(s);
    let m = s.sigma / (2.0 * s.k);
    [p[0], p[1], s.sigma, s.theta, fs.sigma_x, fs.sigma_y, fs.tau_xy, m - s.theta, m + s.theta]
}

pub fn sample(c: &Common) -> CliResult<()> {
    let params = parse_params(c.params.as_deref(), c.k)?;
    let region = parse_region(c.region.as_deref(), c.polar)?;
    let n = c.n.unwrap_or(50);
    if n < 2 {
        return Err(Failure::Config("--n must be at least 2".into()));
    }
    let rows: Vec<[f64; 9]> = match target(&c.solution, &params)? {
        Target::Plane(f) => {
            let region = region.unwrap_or_else(|| default_region(&c.solution));
            region
                .lattice(n)
                .into_par_iter()
                .filter_map(|q| {
                    let p = Point2::new(region.frame, q[0], q[1]).ok()?;
                    let s = f.state(&p).ok()?;
                    Some(sample_row(p.xy(), &s))
                })
                .collect()
        }
        // The region is a box in the characteristic coordinates (xi, eta).
        Target::Characteristic(f, sign) => {
            let region = region.unwrap_or_else(|| revuzhenko_box(sign));
            region
                .lattice(n)
                .into_par_iter()
                .filter_map(|q| {
                    let (p, s) = f.state(CharCoords::new(q[0], q[1])).ok()?;
                    Some(sample_row(p.xy(), &s))
                })
                .collect()
        }
    };
    if rows.is_empty() {
        return Err(Failure::Domain(format!("no lattice point lies in the domain of `{}`", c.solution)));
    }
    let bytes = match c.format {
        Format::Csv => {
            let mut out = String::from(SAMPLE_HEADER);
            out.push('\n');
            for r in &rows {
                csv_row(&mut out, r);
                out.push('\n');
            }
            out.into_bytes()
        }
        Format::Json => {
            let keys: Vec<&str> = SAMPLE_HEADER.split(',').collect();
            let items: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(keys.iter().zip(r).map(|(k, v)| (k.to_string(), json!(v))).collect()))
                .collect();
            to_json(&Value::Array(items))
        }
        Format::Svg => return Err(no_format("sample", c.format)),
    };
    emit(c.out.as_deref(), &bytes)
}

/// A traced or sampled slip line: rows of `s, x, y, sigma, theta, xi, eta`.
struct SlipCurve {
    family: Family,
    rows: Vec<[f64; 7]>,
}

fn polyline_rows(line: &Polyline) -> Vec<[f64; 7]> {
    line.vertices.iter().map(|v| [v.s, v.x, v.y, v.sigma, v.theta, v.xi, v.eta]).collect()
}

/// Both halves of the line through `seed`, joined with `s < 0` on the backward half.
fn trace_through(f: &dyn StressField, seed: &Point2, family: Family, c: &Common) -> CliResult<Option<SlipCurve>> {
    let mut halves = Vec::with_capacity(2);
    for backward in [true, false] {
        let opts = TraceOptions { step: c.step, max_arclen: c.length, backward, ..Default::default() };
        match trace_slipline(f, seed, family, &opts) {
            Ok(line) => halves.push(polyline_rows(&line)),
            Err(Error::StartOutsideDomain) => return Ok(None),
            Err(e) => return Err(e.into()),
        }
    }
    let forward = halves.pop().expect("two halves");
    let mut rows: Vec<[f64; 7]> = halves.pop().expect("two halves").into_iter().skip(1).rev().collect();
    for r in &mut rows {
        r[0] = -r[0];
    }
    rows.extend(forward);
    Ok(Some(SlipCurve { family, rows }))
}

fn characteristic_curves(
    f: &dyn CharacteristicField,
    sign: RevuzhenkoSign,
    region: Option<Region>,
    family: Family,
    n: usize,
) -> Vec<SlipCurve> {
    let net = revuzhenko_net(sign, family);
    // Region boxes are given as (xi, eta); second-family nets run over (eta, xi).
    let [u0, u1, v0, v1] = match (region, family) {
        (None, _) => net.default_box,
        (Some(r), Family::First) => [r.a[0], r.a[1], r.b[0], r.b[1]],
        (Some(r), Family::Second) => [r.b[0], r.b[1], r.a[0], r.a[1]],
    };
    (0..n)
        .map(|i| {
            let u = u0 + (i as f64 + 0.5) / n as f64 * (u1 - u0);
            let mut rows: Vec<[f64; 7]> = Vec::new();
            for (v, _) in net.curve(u).sample(v0, v1, CHAR_CURVE_SAMPLES) {
                let cc = match family {
                    Family::First => CharCoords::new(u, v),
                    Family::Second => CharCoords::new(v, u),
                };
                let Ok((p, s)) = f.state(cc) else { continue };
                let [x, y] = p.xy();
                let s_prev = rows.last().map_or(0.0, |r| r[0] + (x - r[1]).hypot(y - r[2]));
                rows.push([s_prev, x, y, s.sigma, s.theta, cc.xi, cc.eta]);
            }
            SlipCurve { family, rows }
        })
        .filter(|c| !c.rows.is_empty())
        .collect()
}

fn envelope_paths(curves: &[EnvelopeCurve]) -> Vec<Path2> {
    curves
        .iter()
        .flat_map(|c| c.branches.iter())
        .map(|b| Path2 { class: "envelope", points: b.iter().map(|s| [s.x, s.y]).collect() })
        .collect()
}

pub fn sliplines(c: &Common) -> CliResult<()> {
    let params = parse_params(c.params.as_deref(), c.k)?;
    let region = parse_region(c.region.as_deref(), c.polar)?;
    let fams = families(c.family)?;
    let n = c.n.unwrap_or(10);
    if n == 0 || !(c.step > 0.0) || !(c.length > 0.0) {
        return Err(Failure::Config("--n, --step and --length must be positive".into()));
    }
    let curves: Vec<SlipCurve> = match target(&c.solution, &params)? {
        Target::Plane(f) => {
            let region = region.unwrap_or_else(|| default_region(&c.solution));
            let margin = TraceOptions::default().margin;
            let seeds = seeds(region, n, |p| f.state(p).is_ok() && f.boundary_distance(p) >= 2.0 * margin);
            let jobs: Vec<(Family, &Point2)> = fams.iter().flat_map(|&fam| seeds.iter().map(move |s| (fam, s))).collect();
            let traced: Vec<CliResult<Option<SlipCurve>>> =
                jobs.into_par_iter().map(|(fam, seed)| trace_through(f.as_ref(), seed, fam, c)).collect();
            let mut out = Vec::new();
            for t in traced {
                out.extend(t?);
            }
            out
        }
        Target::Characteristic(f, sign) => {
            fams.iter().flat_map(|&fam| characteristic_curves(f.as_ref(), sign, region, fam, n)).collect()
        }
    };
    if curves.is_empty() {
        return Err(Failure::Domain(format!("no seed lies in the domain of `{}`", c.solution)));
    }
    let bytes = match c.format {
        Format::Csv => {
            let mut out = String::from(SLIPLINE_HEADER);
            out.push('\n');
            for (id, curve) in curves.iter().enumerate() {
                for r in &curve.rows {
                    out.push_str(&id.to_string());
                    out.push(',');
                    csv_row(&mut out, r);
                    out.push_str(if curve.family == Family::First { ",1\n" } else { ",2\n" });
                }
            }
            out.into_bytes()
        }
        Format::Json => {
            let items: Vec<Value> = curves
                .iter()
                .enumerate()
                .map(|(id, curve)| {
                    let col = |j: usize| curve.rows.iter().map(|r| r[j]).collect::<Vec<f64>>();
                    json!({
                        "curve_id": id, "family": family_index(curve.family) as u8,
                        "s": col(0), "x": col(1), "y": col(2), "sigma": col(3), "theta": col(4), "xi": col(5), "eta": col(6),
                    })
                })
                .collect();
            to_json(&Value::Array(items))
        }
        Format::Svg => {
            let mut paths: Vec<Path2> = curves
                .iter()
                .map(|curve| Path2 {
                    class: family_class(curve.family),
                    points: curve.rows.iter().map(|r| [r[1], r[2]]).collect(),
                })
                .collect();
            // Overlay the documented envelopes where the solution has them.
            if let Ok(env) = envelope_closed_form(&c.solution, &params) {
                let curves: Vec<EnvelopeCurve> =
                    env.iter().filter(|e| fams.contains(&e.family)).map(|e| e.to_curve(ENVELOPE_GRID)).collect();
                paths.extend(envelope_paths(&curves));
            }
            svg(&paths, &["family-1", "family-2"]).into_bytes()
        }
    };
    emit(c.out.as_deref(), &bytes)
}

pub fn envelope(c: &Common, method: Method) -> CliResult<()> {
    let params = parse_params(c.params.as_deref(), c.k)?;
    let fams = families(c.family)?;
    let curves: Vec<EnvelopeCurve> = match method {
        Method::Closed => {
            if c.region.is_some() {
                return Err(Failure::Config("--region applies to --method numeric only".into()));
            }
            let n = c.n.unwrap_or(ENVELOPE_GRID);
            envelope_closed_form(&c.solution, &params)?
                .iter()
                .filter(|e| fams.contains(&e.family))
                .map(|e| e.to_curve(n))
                .collect()
        }
        Method::Numeric => {
            // Here the region is the box of net coordinates (u, v) that is scanned.
            let bbox = parse_region(c.region.as_deref(), false)?.map(|r| [r.a[0], r.a[1], r.b[0], r.b[1]]);
            let grid = c.n.unwrap_or(ENVELOPE_GRID);
            let t = target(&c.solution, &params)?;
            let mut out = Vec::new();
            for &fam in &fams {
                let net = match &t {
                    Target::Plane(f) => f.slip_net(fam)?,
                    Target::Characteristic(_, sign) => revuzhenko_net(*sign, fam),
                };
                match envelope_numeric(&net, bbox, grid) {
                    Ok(e) => out.push(e),
                    Err(Error::NoSignChange) if fams.len() > 1 => {}
                    Err(e) => return Err(e.into()),
                }
            }
            out
        }
    };
    if curves.iter().all(|e| e.is_empty()) {
        return Err(Failure::Domain(format!("`{}` has no envelope for the requested families", c.solution)));
    }
    let bytes = match c.format {
        Format::Csv => {
            let mut out = String::from(ENVELOPE_HEADER);
            out.push('\n');
            let mut id = 0;
            for curve in &curves {
                for branch in &curve.branches {
                    let mut s = 0.0;
                    let mut prev: Option<[f64; 2]> = None;
                    for p in branch {
                        if let Some(q) = prev {
                            s += (p.x - q[0]).hypot(p.y - q[1]);
                        }
                        prev = Some([p.x, p.y]);
                        out.push_str(&id.to_string());
                        out.push(',');
                        csv_row(&mut out, &[s, p.x, p.y, p.u, p.v, family_index(curve.family)]);
                        out.push('\n');
                    }
                    id += 1;
                }
            }
            out.into_bytes()
        }
        Format::Json => to_json(&serde_json::to_value(&curves).expect("envelopes serialize")),
        Format::Svg => svg(&envelope_paths(&curves), &[]).into_bytes(),
    };
    emit(c.out.as_deref(), &bytes)
}

fn stream_row(v: &StreamVertex, s: f64) -> [f64; 7] {
    [s, v.x, v.y, v.u, v.v, v.dissipation, if v.diss_ok { 1.0 } else { 0.0 }]
}

pub fn streamlines(c: &Common) -> CliResult<()> {
    let params = parse_params(c.params.as_deref(), c.k)?;
    let region = parse_region(c.region.as_deref(), c.polar)?.unwrap_or_else(|| velocity_region(&c.solution));
    let n = c.n.unwrap_or(8);
    if n == 0 || !(c.step > 0.0) || !(c.length > 0.0) {
        return Err(Failure::Config("--n, --step and --length must be positive".into()));
    }
    let vf = velocity_field(&c.solution, &params)?;
    let margin = StreamOptions::default().margin;
    let seeds = seeds(region, n, |p| vf.eval(p).is_ok() && vf.boundary_distance(p) >= 2.0 * margin);
    let traced: Vec<CliResult<Option<Vec<[f64; 7]>>>> = seeds
        .par_iter()
        .map(|seed| {
            let mut halves = Vec::with_capacity(2);
            for backward in [true, false] {
                let opts = StreamOptions { step: c.step, max_arclen: c.length, backward, ..Default::default() };
                match trace_streamline(vf.as_ref(), seed, &opts) {
                    Ok(line) => halves.push(line.vertices),
                    Err(Error::StartOutsideDomain | Error::StagnationPoint(_)) => return Ok(None),
                    Err(e) => return Err(e.into()),
                }
            }
            let (back, fwd) = (&halves[0], &halves[1]);
            let mut rows: Vec<[f64; 7]> = back.iter().skip(1).rev().map(|v| stream_row(v, -v.s)).collect();
            rows.extend(fwd.iter().map(|v| stream_row(v, v.s)));
            Ok(Some(rows))
        })
        .collect();
    let mut curves = Vec::new();
    for t in traced {
        curves.extend(t?);
    }
    if curves.is_empty() {
        return Err(Failure::Domain(format!("no seed lies in the domain of `{}`", c.solution)));
    }
    let bytes = match c.format {
        Format::Csv => {
            let mut out = String::from(STREAMLINE_HEADER);
            out.push('\n');
            for (id, rows) in curves.iter().enumerate() {
                for r in rows {
                    out.push_str(&id.to_string());
                    out.push(',');
                    csv_row(&mut out, &r[..6]);
                    out.push_str(if r[6] == 1.0 { ",1\n" } else { ",0\n" });
                }
            }
            out.into_bytes()
        }
        Format::Json => {
            let items: Vec<Value> = curves
                .iter()
                .enumerate()
                .map(|(id, rows)| {
                    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<f64>>();
                    let ok: Vec<bool> = rows.iter().map(|r| r[6] == 1.0).collect();
                    json!({"curve_id": id, "s": col(0), "x": col(1), "y": col(2), "u": col(3), "v": col(4), "D": col(5), "diss_ok": ok})
                })
                .collect();
            to_json(&Value::Array(items))
        }
        Format::Svg => {
            let paths: Vec<Path2> = curves
                .iter()
                .map(|rows| Path2 { class: "streamline", points: rows.iter().map(|r| [r[1], r[2]]).collect() })
                .collect();
            svg(&paths, &[]).into_bytes()
        }
    };
    emit(c.out.as_deref(), &bytes)
}

pub fn velocity(c: &Common) -> CliResult<()> {
    let params = parse_params(c.params.as_deref(), c.k)?;
    let region = parse_region(c.region.as_deref(), c.polar)?.unwrap_or_else(|| velocity_region(&c.solution));
    let n = c.n.unwrap_or(30);
    if n < 2 {
        return Err(Failure::Config("--n must be at least 2".into()));
    }
    let vf = velocity_field(&c.solution, &params)?;
    let rows: Vec<([f64; 5], bool)> = region
        .lattice(n)
        .into_par_iter()
        .filter_map(|q| {
            let p = Point2::new(region.frame, q[0], q[1]).ok()?.to_cartesian();
            let [u, v] = vf.eval(&p).ok()?;
            let d = dissipation_at(vf.as_ref(), &p).ok()?;
            let ok = dissipation_sign_ok(vf.as_ref(), vf.background(), &p).unwrap_or(false);
            let [x, y] = p.xy();
            Some(([x, y, u, v, d], ok))
        })
        .collect();
    if rows.is_empty() {
        return Err(Failure::Domain(format!("no lattice point lies in the domain of `{}`", c.solution)));
    }
    let bytes = match c.format {
        Format::Csv => {
            let mut out = String::from(VELOCITY_HEADER);
            out.push('\n');
            for (r, ok) in &rows {
                csv_row(&mut out, r);
                out.push_str(if *ok { ",1\n" } else { ",0\n" });
            }
            out.into_bytes()
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(r, ok)| json!({"x": r[0], "y": r[1], "u": r[2], "v": r[3], "D": r[4], "diss_ok": ok}))
                .collect();
            to_json(&Value::Array(items))
        }
        Format::Svg => return Err(no_format("velocity", c.format)),
    };
    emit(c.out.as_deref(), &bytes)
}

pub fn verify(a: &VerifyArgs) -> CliResult<()> {
    let mut cfg = VerifyConfig::default();
    if let Some(n) = a.n {
        if n < 2 {
            return Err(Failure::Config("--n must be at least 2".into()));
        }
        cfg.grid = n;
    }
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let report = if a.all {
        if a.params.is_some() || a.region.is_some() || a.k.is_some() {
            return Err(Failure::Config("--all runs fixed suites; --params, --region and --k do not apply".into()));
        }
        verify_all(&cfg)
    } else {
        let name = a.solution.as_deref().expect("clap requires --solution without --all");
        let params = parse_params(a.params.as_deref(), a.k)?;
        let region = parse_region(a.region.as_deref(), a.polar)?;
        if let Some(eps) = a.perturb {
            if !eps.is_finite() {
                return Err(Failure::Config("--perturb must be finite".into()));
            }
        }
        verify_solution(name, &params, region, a.perturb, &cfg)?
    };
    let mut bytes = report.to_json().into_bytes();
    bytes.push(b'\n');
    emit(a.out.as_deref(), &bytes)?;
    for f in report.failures() {
        eprintln!(
            "FAIL {}: {} (value {:e}, threshold {:e}){}",
            f.suite,
            f.name,
            f.value,
            f.threshold,
            f.detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default()
        );
    }
    eprintln!("{} checks, {} failed", report.n_checks, report.n_failed);
    if report.passed {
        Ok(())
    } else {
        let first = report.failures().next().map(|c| format!("{}: {}", c.suite, c.name)).unwrap_or_default();
        Err(Failure::Verification(format!("{} of {} checks failed, first: {first}", report.n_failed, report.n_checks)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use slipline_core::plane::Frame;

    #[test]
    fn seeds_respect_the_filter() {
        let r = Region::polar(1.0, 2.0, -1.0, 1.0);
        let all = seeds(r, 4, |_| true);
        assert_eq!(all.len(), 4);
        for p in &all {
            assert_eq!(p.frame(), Frame::Polar);
            let [a, b] = p.coords();
            assert!((1.0..=2.0).contains(&a) && (-1.0..=1.0).contains(&b));
        }
        let upper = seeds(r, 4, |p| p.coords()[1] > 0.0);
        assert!(upper.len() == 4 && upper.iter().all(|p| p.coords()[1] > 0.0));
        assert!(seeds(r, 4, |_| false).is_empty());
    }

    #[test]
    fn sample_row_layout() {
        let s = StressState { sigma: 1.0, theta: 0.0, k: 0.5 };
        let r = sample_row([0.5, 0.25], &s);
        assert_eq!(&r[..4], &[0.5, 0.25, 1.0, 0.0]);
        assert_eq!(r[6], 0.5);
        assert_eq!((r[7], r[8]), (1.0, 1.0));
    }
}
