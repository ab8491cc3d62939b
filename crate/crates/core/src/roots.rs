//! Scalar root finding: sign-change scans, bisection and a Newton iteration
//! safeguarded by a bracket.

use crate::error::{Error, Result};

/// Bisection on `[a, b]` where `f(a)` and `f(b)` have opposite signs.
///
/// Stops once the bracket is narrower than `x_tol` or an exact zero is hit.
pub fn bisect<F>(mut f: F, mut a: f64, mut b: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoBracket(format!(
            "bisection on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}"
        )));
    }
    // 200 halvings exhaust any f64 interval.
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= x_tol || mid == a || mid == b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Walks `[start, end]` in steps of `step` and returns the first sub-interval
/// on which `f` changes sign (or hits zero at its right end).
pub fn scan_sign_change<F>(mut f: F, start: f64, end: f64, step: f64) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let n = ((end - start) / step).ceil() as usize;
    let mut x0 = start;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = if i == n { end } else { start + step * i as f64 };
        let f1 = f(x1);
        if f1 == 0.0 || f0.signum() != f1.signum() {
            return Some((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    None
}

/// Newton's method kept inside the bracket `[lo, hi]`; a step that leaves the
/// bracket, or fails to shrink the residual, is replaced by bisection.
///
/// `f` returns `(value, derivative)`. Requires `f(lo) <= 0 <= f(hi)`.
/// Converges when `|f(x)| <= rel_tol * scale(x)`.
pub fn safeguarded_newton<F, S>(
    mut f: F,
    scale: S,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
    S: Fn(f64) -> f64,
{
    let mut x = 0.5 * (lo + hi);
    let mut last = f64::INFINITY;
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if !fx.is_finite() {
            return Err(Error::Domain(format!("non-finite residual at x = {x}")));
        }
        let scaled = fx.abs() / scale(x);
        if scaled <= rel_tol {
            return polish(&mut f, x, scale);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let bisect_step = 0.5 * (lo + hi);
        let progressing = scaled < 0.5 * last;
        x = if dfx.is_finite() && dfx != 0.0 && newton > lo && newton < hi && progressing {
            newton
        } else {
            bisect_step
        };
        last = scaled;
        if hi - lo <= f64::EPSILON * hi.abs() {
            return polish(&mut f, 0.5 * (lo + hi), scale);
        }
    }
    Err(Error::NoConvergence {
        what: "safeguarded Newton",
        iterations: max_iter,
        residual: last,
    })
}

// Two extra Newton steps, kept only while they reduce the residual.
fn polish<F, S>(f: &mut F, mut x: f64, scale: S) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
    S: Fn(f64) -> f64,
{
    let (mut fx, mut dfx) = f(x);
    for _ in 0..2 {
        if dfx == 0.0 || !dfx.is_finite() {
            break;
        }
        let cand = x - fx / dfx;
        let (fc, dfc) = f(cand);
        if fc.abs() / scale(cand) < fx.abs() / scale(x) {
            x = cand;
            fx = fc;
            dfx = dfc;
        } else {
            break;
        }
    }
    Ok(x)
}
