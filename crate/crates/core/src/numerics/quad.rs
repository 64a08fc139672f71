//! Adaptive Simpson quadrature with Richardson correction.
//!
//! The interval is first split at the caller's breakpoints and into a fixed number of
//! initial panels, so integrands with kinks or jumps at known locations are integrated
//! exactly piecewise.

use crate::error::{Error, Result};

/// Acceptance criterion: a panel converges when its error estimate is below
/// `max(abs, rel * |I|)`, where `I` is a coarse estimate of the whole integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub const fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-14, 1e-11)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const MAX_DEPTH: u32 = 48;
const INITIAL_PANELS: usize = 8;
const MAX_EVALUATIONS: usize = 1 << 21;

/// Integrates `f` over `[a, b]`, splitting at every breakpoint strictly inside the interval.
pub fn integrate<F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    integrate_fallible(|x| Ok(f(x)), a, b, breakpoints, tol)
}

/// As [`integrate`], for integrands that may fail.
pub fn integrate_fallible<F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integrate", format!("non-finite bounds [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if b < a {
        let est = integrate_fallible(f, b, a, breakpoints, tol)?;
        return Ok(Estimate {
            value: -est.value,
            ..est
        });
    }

    let mut nodes = vec![a];
    nodes.extend(breakpoints.iter().copied().filter(|&p| p > a && p < b));
    nodes.push(b);
    nodes.sort_by(|x, y| x.total_cmp(y));
    nodes.dedup();

    // Panels: each segment split evenly into INITIAL_PANELS pieces.
    let mut panels = Vec::with_capacity((nodes.len() - 1) * INITIAL_PANELS);
    for w in nodes.windows(2) {
        let h = (w[1] - w[0]) / INITIAL_PANELS as f64;
        for k in 0..INITIAL_PANELS {
            let lo = w[0] + h * k as f64;
            let hi = if k + 1 == INITIAL_PANELS { w[1] } else { lo + h };
            panels.push((lo, hi));
        }
    }

    // Endpoints of a segment adjacent to a jump must be sampled from inside the segment.
    let mut evals = 0usize;
    let mut seeds = Vec::with_capacity(panels.len());
    let mut coarse = 0.0;
    for &(lo, hi) in &panels {
        let fa = f(inward(lo, hi))?;
        let fm = f(0.5 * (lo + hi))?;
        let fb = f(inward(hi, lo))?;
        evals += 3;
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        coarse += whole;
        seeds.push((lo, hi, fa, fm, fb, whole));
    }

    let target = tol.abs.max(tol.rel * coarse.abs());
    let span = b - a;
    let mut value = 0.0;
    let mut failed = None;
    let mut st = State {
        evals,
        error: 0.0,
        failed: false,
    };
    for (lo, hi, fa, fm, fb, whole) in seeds {
        let local_tol = target * (hi - lo) / span;
        st.failed = false;
        value += recurse(&mut f, lo, hi, fa, fm, fb, whole, local_tol, MAX_DEPTH, &mut st)?;
        if st.failed && failed.is_none() {
            failed = Some((lo, hi));
        }
    }
    evals = st.evals;
    let error = st.error;

    if !value.is_finite() {
        return Err(Error::Quadrature {
            a,
            b,
            estimate: f64::INFINITY,
        });
    }
    if let Some((lo, hi)) = failed {
        return Err(Error::Quadrature {
            a: lo,
            b: hi,
            estimate: error,
        });
    }
    Ok(Estimate {
        value,
        error,
        evaluations: evals,
    })
}

struct State {
    evals: usize,
    error: f64,
    failed: bool,
}

// Nudges an endpoint one ulp-scale step toward the interior so one-sided limits are used.
fn inward(x: f64, toward: f64) -> f64 {
    let step = (x.abs().max(toward.abs()) * 4.0 * f64::EPSILON).max(f64::MIN_POSITIVE);
    let y = if toward > x { x + step } else { x - step };
    if (toward > x && y < toward) || (toward < x && y > toward) {
        y
    } else {
        x
    }
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    st: &mut State,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    st.evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || m <= a || m >= b {
        st.error += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || st.evals > MAX_EVALUATIONS {
        st.failed = true;
        st.error += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, st)?;
    let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, st)?;
    Ok(l + r)
}
