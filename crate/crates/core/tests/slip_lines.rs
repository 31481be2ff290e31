use std::f64::consts::{FRAC_PI_4, PI};

use slipline_core::catalog::{
    NadaiChannel, NadaiTwoCircles, NadaiVortex, Prandtl, RevuzhenkoSign, SimpleWave, Spiral, StressField, ThetaBracket,
};
use slipline_core::characteristics::{
    closed_form_deviation, envelope_closed_form, envelope_numeric, max_tangency_angle, revuzhenko_net,
    revuzhenko_root, slip_direction, trace_slipline, EnvelopeKind, Family, Polyline, TraceOptions,
};
use slipline_core::plane::{FunctionParam, Point2};
use serde_json::json;

fn longest(field: &dyn StressField, start: Point2, family: Family, len: f64) -> Polyline {
    let opts = TraceOptions { max_arclen: len, ..Default::default() };
    let a = trace_slipline(field, &start, family, &opts).unwrap();
    let b = trace_slipline(field, &start, family, &TraceOptions { backward: true, ..opts }).unwrap();
    if a.arclength() >= b.arclength() {
        a
    } else {
        b
    }
}

#[test]
fn riemann_invariants_are_conserved() {
    let prandtl = Prandtl::default();
    let circles = NadaiTwoCircles::new(1.0, 2.0, 0.5).unwrap();
    let vortex = NadaiVortex::new(1.0, 0.0, 0.5).unwrap();
    let wave = SimpleWave::new(
        FunctionParam::constant(0.5),
        0,
        0.0,
        0.5,
        ThetaBracket::Fixed { lo: -1.2, hi: 1.2 },
    )
    .unwrap();
    let cases: Vec<(&dyn StressField, Point2)> = vec![
        (&prandtl, Point2::cartesian(0.0, 0.1)),
        (&circles, Point2::polar(1.5, 0.2).unwrap()),
        (&vortex, Point2::polar(1.5, 0.2).unwrap()),
        (&wave, Point2::cartesian(1.0, 0.3)),
    ];
    for (f, p) in cases {
        for fam in [Family::First, Family::Second] {
            let line = longest(f, p, fam, 1.0);
            assert!(line.arclength() > 0.2, "{} {fam:?}: {}", f.name(), line.arclength());
            let drift = line.riemann_drift();
            eprintln!("{} {fam:?} len {:.3} drift {drift:e}", f.name(), line.arclength());
            assert!(drift < 1e-5, "{} {fam:?}: {drift}", f.name());
        }
    }
}

#[test]
fn traces_follow_closed_forms() {
    let prandtl = Prandtl::default();
    let circles = NadaiTwoCircles::new(1.0, 2.0, 0.5).unwrap();
    let channel = NadaiChannel::new(2.0, 0.5, 0.0, 0.0).unwrap();
    let spiral = Spiral::canonical(0.5).unwrap();
    let cases: Vec<(&dyn StressField, Point2)> = vec![
        (&prandtl, Point2::cartesian(0.0, -0.95)),
        (&circles, Point2::polar(1.02, 0.0).unwrap()),
        (&circles, Point2::polar(1.98, 0.0).unwrap()),
        (&channel, Point2::polar(1.0, channel.phi_of_psi(-0.05)).unwrap()),
        (&channel, Point2::polar(1.0, channel.phi_of_psi(-1.5)).unwrap()),
        (&spiral, Point2::polar(2.0, 2f64.ln()).unwrap()),
    ];
    for (f, p) in cases {
        for fam in [Family::First, Family::Second] {
            let line = longest(f, p, fam, 3.0);
            let net = f.slip_net(fam).unwrap();
            let dev = closed_form_deviation(&net, &line).unwrap();
            eprintln!("{} {fam:?} len {:.3} dev {dev:e} {:?}", f.name(), line.arclength(), line.stop);
            assert!(dev < 1e-5, "{} {fam:?}: {dev}", f.name());
        }
    }
}

#[test]
fn revuzhenko_numeric_envelope_matches_root() {
    let net = revuzhenko_net(RevuzhenkoSign::Lower, Family::First);
    let env = envelope_numeric(&net, None, 400).unwrap();
    let mut worst = 0.0f64;
    for s in env.samples() {
        let eta = revuzhenko_root(RevuzhenkoSign::Lower, -1.0, s.u).unwrap();
        worst = worst.max((s.v - eta).abs());
    }
    eprintln!("revuzhenko envelope {} samples, worst {worst:e}", env.len());
    assert!(env.len() > 300);
    assert!(worst < 1e-8);
    let f = slipline_core::catalog::Revuzhenko::new(RevuzhenkoSign::Lower);
    use slipline_core::catalog::{CharCoords, CharacteristicField};
    let angle = max_tangency_angle(&env, |s| {
        let m = f.map(CharCoords::new(s.u, s.v)).ok()?;
        Some(slip_direction(m.theta, Family::First))
    })
    .unwrap();
    eprintln!("revuzhenko tangency {angle:e}");
    assert!(angle < 1e-3);
}

#[test]
fn two_circle_numeric_envelopes() {
    let f = NadaiTwoCircles::new(1.0, 2f64.sqrt(), 0.5).unwrap();
    for (fam, radius) in [(Family::First, 1.0), (Family::Second, 2f64.sqrt())] {
        let env = envelope_numeric(&f.slip_net(fam).unwrap(), None, 400).unwrap();
        let worst = env.samples().map(|s| (s.x.hypot(s.y) - radius).abs()).fold(0.0, f64::max);
        let angle = max_tangency_angle(&env, |s| {
            let (r, phi) = (s.x.hypot(s.y), s.y.atan2(s.x));
            let g = f.g(r.clamp(f.a, f.b));
            Some(slip_direction(g + phi, fam))
        })
        .unwrap();
        eprintln!("two circles {fam:?}: {} samples, {} cusps, dist {worst:e}, angle {angle:e}", env.len(), env.cusps.len());
        assert!(env.len() > 300 && worst < 1e-6 && angle < 1e-3);
    }
}

#[test]
fn channel_envelope_is_the_wall() {
    let ch = NadaiChannel::new(2.0, 0.5, 0.0, 0.0).unwrap();
    let env = envelope_numeric(&ch.slip_net(Family::First).unwrap(), Some([-1.0, 1.0, -0.4, 0.3]), 200).unwrap();
    let wall = ch.phi_of_psi(0.0);
    let worst = env.samples().map(|s| (s.y.atan2(s.x) - wall).abs()).fold(0.0, f64::max);
    let angle = max_tangency_angle(&env, |s| {
        let phi = s.y.atan2(s.x);
        Some(slip_direction(phi + 0.0, Family::First))
    })
    .unwrap();
    eprintln!("channel: {} samples, wall dev {worst:e}, angle {angle:e}", env.len());
    assert!(env.len() > 100 && worst < 1e-8 && angle < 1e-3);
    // A traced first-family line runs into the wall tangentially.
    let start = Point2::polar(1.0, ch.phi_of_psi(-0.3)).unwrap();
    let ends: Vec<f64> = [false, true]
        .into_iter()
        .map(|backward| {
            let opts = TraceOptions { max_arclen: 5.0, backward, ..Default::default() };
            let line = trace_slipline(&ch, &start, Family::First, &opts).unwrap();
            let last = line.vertices.last().unwrap();
            last.theta - last.b
        })
        .collect();
    assert!(ends.iter().any(|psi| psi.abs() < 0.02), "{ends:?}");
    assert!(matches!(
        envelope_closed_form("nadai_channel", &json!({"c": 0.5})),
        Err(slipline_core::Error::NoEnvelope(_))
    ));
}

#[test]
fn spiral_envelopes_are_log_spirals() {
    let sp = Spiral::canonical(0.5).unwrap();
    let closed = sp.closed_envelopes().unwrap();
    for fam in [Family::First, Family::Second] {
        let (g_lo, g_hi) = sp.branch();
        let bbox = [-PI, PI, g_lo - 0.1, g_hi + 0.1];
        let env = envelope_numeric(&sp.slip_net(fam).unwrap(), Some(bbox), 200).unwrap();
        let ce = closed.iter().find(|e| e.family == fam).unwrap();
        let EnvelopeKind::LogSpiral { alpha, offset } = ce.kind else { panic!() };
        let worst = env
            .samples()
            .map(|s| {
                let (r, phi) = (s.x.hypot(s.y), s.y.atan2(s.x));
                // Compare modulo whole turns of the spiral.
                let k = ((r.ln() - alpha * phi - offset) / (2.0 * PI * alpha)).round();
                (r.ln() - alpha * (phi + 2.0 * PI * k) - offset).abs()
            })
            .fold(0.0, f64::max);
        eprintln!("spiral {fam:?}: {} samples, {} cusps, dev {worst:e}", env.len(), env.cusps.len());
        assert!(env.len() > 100 && worst < 1e-8);
    }
}

#[test]
fn simple_wave_envelope_relation() {
    // Phi = 1 + theta^2: the edge of regression satisfies x + f'(theta) sin^2 theta = 0, f = Phi / sin theta.
    let w = SimpleWave::new(
        FunctionParam::polynomial(vec![1.0, 0.0, 1.0]),
        0,
        0.0,
        0.5,
        ThetaBracket::Fixed { lo: 0.3, hi: 1.2 },
    )
    .unwrap();
    let env = envelope_numeric(&w.slip_net(Family::Second).unwrap(), Some([0.3, 1.2, -3.0, 3.0]), 200).unwrap();
    let mut worst = 0.0f64;
    for s in env.samples() {
        let t = s.u;
        let (sn, cs) = t.sin_cos();
        let (phi, dphi) = (1.0 + t * t, 2.0 * t);
        let df = dphi / sn - phi * cs / (sn * sn);
        worst = worst.max((s.x + df * sn * sn).abs());
    }
    eprintln!("simple wave envelope: {} samples, {worst:e}", env.len());
    assert!(env.len() > 100 && worst < 1e-8);
    let spiral2 = envelope_closed_form("spiral_2", &json!({"C": 1.0})).unwrap();
    let p = spiral2[0].point(0.0).unwrap();
    let (r, phi) = (p[0].hypot(p[1]), p[1].atan2(p[0]));
    assert!((r - 2f64.sqrt() * (phi - FRAC_PI_4).exp()).abs() < 1e-14);
    assert!((phi - FRAC_PI_4).abs() < 1e-15);
}
