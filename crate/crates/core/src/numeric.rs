//! Small numerical kernels: Richardson central differences, adaptive Simpson
//! quadrature, bracketed root finding and a fixed-step RK4 stepper.

use crate::error::{Error, Result};

/// Default finite-difference step, `1e-4 * max(1, |x|)`.
pub fn default_step(x: f64) -> f64 {
    1e-4 * x.abs().max(1.0)
}

/// Round-trip safe text form with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Central difference with one Richardson extrapolation step (error `O(h^4)`).
pub fn derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let coarse = d(h);
    let fine = d(0.5 * h);
    (4.0 * fine - coarse) / 3.0
}

/// Partial derivative of `f` with respect to variable `index` at `point`.
pub fn fd_partial<const N: usize>(
    f: impl Fn(&[f64; N]) -> f64,
    point: &[f64; N],
    index: usize,
    h: f64,
) -> f64 {
    derivative(
        |t| {
            let mut p = *point;
            p[index] = t;
            f(&p)
        },
        point[index],
        h,
    )
}

/// Same as [`fd_partial`] for vector-valued `f`, one component per entry.
pub fn fd_partial_vec<const N: usize, const M: usize>(
    f: impl Fn(&[f64; N]) -> [f64; M],
    point: &[f64; N],
    index: usize,
    h: f64,
) -> [f64; M] {
    let x = point[index];
    let at = |t: f64| {
        let mut p = *point;
        p[index] = t;
        f(&p)
    };
    let d = |h: f64| {
        let (a, b) = (at(x + h), at(x - h));
        let mut out = [0.0; M];
        for i in 0..M {
            out[i] = (a[i] - b[i]) / (2.0 * h);
        }
        out
    };
    let coarse = d(h);
    let fine = d(0.5 * h);
    let mut out = [0.0; M];
    for i in 0..M {
        out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    }
    out
}

const SIMPSON_MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Non-finite integrand values are reported as a singularity at the offending
/// abscissa rather than propagated.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::QuadratureSingularity { at: x })
        }
    };
    let fa = eval(a)?;
    let fb = eval(b)?;
    let m = 0.5 * (a + b);
    let fm = eval(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&eval, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    eval: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval(lm)?;
    let frm = eval(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a).abs() < 1e-14 * a.abs().max(1.0) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailure { a, b });
    }
    Ok(simpson_step(eval, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(eval, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Bracketed bisection to `tol` followed by one guarded Newton step.
pub fn bisect_newton(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.signum() != fb.signum()) || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoRootInBracket { lo, hi });
    }
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    let h = (b - a).max(1e-9 * x.abs().max(1.0));
    let slope = (f(x + h) - f(x - h)) / (2.0 * h);
    if slope.is_finite() && slope != 0.0 {
        let y = x - fx / slope;
        if y >= a && y <= b && f(y).abs() <= fx.abs() {
            return Ok(y);
        }
    }
    Ok(x)
}

/// Sub-brackets of `[lo, hi]` (split into `n` equal parts) where `f` changes
/// sign. Exact zeros at interior grid nodes are returned as degenerate brackets.
pub fn sign_change_brackets(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let n = n.max(1);
    let step = (hi - lo) / n as f64;
    let mut out = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = if i == n { hi } else { lo + step * i as f64 };
        let f1 = f(x1);
        if f0.is_finite() && f1.is_finite() {
            if f0 == 0.0 {
                if i == 1 {
                    out.push((x0, x0));
                }
            } else if f1 == 0.0 || f0.signum() != f1.signum() {
                out.push((x0, x1));
            }
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// One classical fourth-order Runge-Kutta step of `y' = f(y)`. `None` if any
/// stage leaves the region where `f` is defined.
pub fn rk4_step<const N: usize>(f: impl Fn(&[f64; N]) -> Option<[f64; N]>, y: &[f64; N], h: f64) -> Option<[f64; N]> {
    let axpy = |a: &[f64; N], s: f64, d: &[f64; N]| {
        let mut out = *a;
        for i in 0..N {
            out[i] += s * d[i];
        }
        out
    };
    let k1 = f(y)?;
    let k2 = f(&axpy(y, 0.5 * h, &k1))?;
    let k3 = f(&axpy(y, 0.5 * h, &k2))?;
    let k4 = f(&axpy(y, h, &k3))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if out.iter().all(|v| v.is_finite()) {
        Some(out)
    } else {
        None
    }
}
