//! Bracketing root finders. Newton is only ever used as a single polishing step
//! on an already-tight bisection bracket.

use crate::error::{Error, Result};

/// Bisects `[a, b]` (which must bracket a sign change) down to a few ulps, then takes one
/// Newton step with `df` if given, keeping the result only if it stays inside the bracket
/// and does not increase `|f|`.
pub fn bisect_newton<F, D>(f: F, df: Option<D>, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::Root(format!(
            "no sign change on [{lo:.6e}, {hi:.6e}] (f = {flo:.3e}, {fhi:.3e})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * mid.abs() {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    if let Some(df) = df {
        let d = df(mid);
        if d != 0.0 && d.is_finite() {
            let x = mid - fm / d;
            if x >= lo && x <= hi && f(x).abs() <= fm.abs() {
                return Ok(x);
            }
        }
    }
    Ok(mid)
}

/// Scans `f` on `start, start + step, ...` up to `limit`, returning the first `count`
/// sign-change brackets.
pub fn scan_brackets<F>(f: F, start: f64, step: f64, limit: f64, count: usize) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut out = Vec::with_capacity(count);
    let mut x0 = start;
    let mut f0 = f(x0);
    let mut k = 1u64;
    while out.len() < count {
        let x1 = start + step * k as f64;
        if x1 > limit {
            break;
        }
        let f1 = f(x1);
        if f1 == 0.0 {
            out.push((x1, x1));
        } else if f0 != 0.0 && f0.signum() != f1.signum() {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
        k += 1;
    }
    out
}
