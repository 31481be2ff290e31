//! Deterministic serialization and atomic file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use slipline_core::numeric::fmt17;

use crate::CliResult;

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return match out.write_all(bytes).and_then(|_| out.flush()) {
            // A closed reader (`| head`) is not an error of ours.
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        };
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// One CSV row of numbers at 17 significant digits.
pub fn csv_row(out: &mut String, cols: &[f64]) {
    for (i, v) in cols.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&fmt17(*v));
    }
}

/// A polyline in the plane, ready for SVG.
pub struct Path2 {
    pub class: &'static str,
    pub points: Vec<[f64; 2]>,
}

/// Raw SVG with one `<path>` per polyline. The viewBox is the bounding box of
/// `bounds_from` classes (all paths when empty), padded by 5 %.
pub fn svg(paths: &[Path2], bounds_from: &[&str]) -> String {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in paths.iter().filter(|p| bounds_from.is_empty() || bounds_from.contains(&p.class)) {
        for q in &p.points {
            for i in 0..2 {
                lo[i] = lo[i].min(q[i]);
                hi[i] = hi[i].max(q[i]);
            }
        }
    }
    if !lo[0].is_finite() {
        lo = [-1.0, -1.0];
        hi = [1.0, 1.0];
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let pad = 0.05 * span;
    let (x0, y0) = (lo[0] - pad, -hi[1] - pad);
    let (w, h) = (hi[0] - lo[0] + 2.0 * pad, hi[1] - lo[1] + 2.0 * pad);
    let stroke = 0.003 * span;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.6} {y0:.6} {w:.6} {h:.6}" width="800" height="{:.0}">"#,
        800.0 * h / w
    );
    let _ = writeln!(
        s,
        "<style>path {{ fill: none; stroke-width: {stroke:.6}; }} .family-1 {{ stroke: #1f5fbf; }} \
         .family-2 {{ stroke: #c0392b; stroke-dasharray: {:.6} {:.6}; }} \
         .envelope {{ stroke: #111; stroke-width: {:.6}; }} .streamline {{ stroke: #2e7d32; }}</style>",
        4.0 * stroke,
        2.0 * stroke,
        2.5 * stroke
    );
    for p in paths {
        if p.points.len() < 2 {
            continue;
        }
        let mut d = String::new();
        for (i, q) in p.points.iter().enumerate() {
            // SVG's y axis points down.
            let _ = write!(d, "{}{:.6} {:.6}", if i == 0 { "M" } else { " L" }, q[0], -q[1]);
        }
        let _ = writeln!(s, r#"<path class="{}" d="{d}"/>"#, p.class);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip() {
        let mut s = String::new();
        csv_row(&mut s, &[0.1, -2.5e-300, 1.0 / 3.0]);
        let back: Vec<f64> = s.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(back, vec![0.1, -2.5e-300, 1.0 / 3.0]);
    }

    #[test]
    fn svg_has_one_path_per_curve() {
        let paths = [
            Path2 { class: "family-1", points: vec![[0.0, 0.0], [1.0, 1.0]] },
            Path2 { class: "envelope", points: vec![[0.0, 1.0], [1.0, 0.0], [2.0, 0.0]] },
            Path2 { class: "family-2", points: vec![[0.0, 0.0]] },
        ];
        let s = svg(&paths, &["family-1"]);
        assert_eq!(s.matches("<path ").count(), 2);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains(r#"viewBox="-0.050000 -1.050000 1.100000 1.100000""#));
    }
}
