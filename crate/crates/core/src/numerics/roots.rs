use crate::error::{Error, Result};
use crate::numerics::NumericsConfig;

const MAX_EXPANSIONS: usize = 60;
const MAX_ITERATIONS: usize = 300;

/// Root of a continuous, strictly monotone `g`.
///
/// If `[lo, hi]` does not bracket a sign change the interval is widened,
/// moving the endpoint where `|g|` is smaller by the current width (at least 1). Inside the bracket, Brent's method is used
/// (bisection safeguarded by secant and inverse quadratic steps), so the
/// iterate never leaves the bracket. Terminates when the bracket is narrower
/// than `root_tol·max(1, |z|)` or `g(z) == 0`.
pub fn find_root_monotone<G: Fn(f64) -> f64>(
    g: G,
    lo: f64,
    hi: f64,
    cfg: &NumericsConfig,
) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = g(a);
    let mut fb = g(b);
    let mut expansions = 0;
    while fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        if expansions == MAX_EXPANSIONS || !fa.is_finite() || !fb.is_finite() {
            return Err(Error::Bracketing { lo: a, hi: b });
        }
        let width = (b - a).max(1.0);
        // Move only the endpoint on the side where the root must lie when the
        // monotone direction is evident; otherwise widen both.
        if fa.abs() < fb.abs() {
            a -= width;
            fa = g(a);
        } else if fb.abs() < fa.abs() {
            b += width;
            fb = g(b);
        } else {
            a -= width;
            b += width;
            fa = g(a);
            fb = g(b);
        }
        expansions += 1;
    }
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Bracketing { lo: a, hi: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }

    brent(&g, a, b, fa, fb, cfg.root_tol)
}

fn brent<G: Fn(f64) -> f64>(
    g: &G,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
) -> Result<f64> {
    let mut c = b;
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITERATIONS {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol * b.abs().max(1.0);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b);
        if fb.is_nan() {
            return Err(Error::Bracketing { lo: a, hi: c });
        }
    }
    Ok(b)
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let ratio = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol * (1.0 + a.abs().max(b.abs())) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
