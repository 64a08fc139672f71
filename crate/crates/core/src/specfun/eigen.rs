use serde::Serialize;

use super::bessel;
use crate::error::{Error, Result};
use crate::numerics::{bisect_newton, scan_brackets};

const SCAN_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EigenFamily {
    /// `2 D b J1(b a) + gamma J0(b a) = 0`.
    Robin,
    /// `J1(b a) = 0`; the constant mode `b = 0` also belongs to the family.
    Neumann,
    /// `J0(b a) = 0`.
    Dirichlet,
}

/// Radial eigenvalues `b_n` on `[0, a]` together with how they were obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenvalues {
    pub radius: f64,
    pub family: EigenFamily,
    pub values: Vec<f64>,
    /// Set when the Robin problem produced no usable roots and Dirichlet roots were returned.
    pub fallback: bool,
    /// Neumann family: the `b = 0` mode is not in `values` and must be added by the caller.
    pub constant_mode: bool,
    /// For `gamma > 0` the Robin operator also has one growing mode `I0(k r)` with
    /// `2 D k I1(k a) = gamma I0(k a)`; its `k` is reported here and not included in `values`.
    pub modified_root: Option<f64>,
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::domain("roots", "count must be at least 1"));
    }
    Ok(())
}

fn roots_of<F, D>(f: F, df: D, count: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64 + Copy,
    D: Fn(f64) -> f64 + Copy,
{
    // Zeros of the functions used here are spaced by roughly pi.
    let limit = 10.0 + 4.0 * count as f64 + std::f64::consts::PI * count as f64;
    let brackets = scan_brackets(f, 0.0, SCAN_STEP, limit, count);
    if brackets.len() < count {
        return Err(Error::Root(format!(
            "found {} of {count} sign changes below x = {limit:.3e}",
            brackets.len()
        )));
    }
    brackets
        .into_iter()
        .map(|(lo, hi)| bisect_newton(f, Some(df), lo, hi))
        .collect()
}

/// First `count` positive zeros of J0.
pub fn j0_positive_roots(count: usize) -> Result<Vec<f64>> {
    check_count(count)?;
    roots_of(|x| bessel::j01(x)[0], |x| -bessel::j01(x)[1], count)
}

/// First `count` positive zeros of J1.
pub fn j1_positive_roots(count: usize) -> Result<Vec<f64>> {
    check_count(count)?;
    roots_of(
        |x| bessel::j01(x)[1],
        |x| {
            let [j0, j1] = bessel::j01(x);
            j0 - j1 / x
        },
        count,
    )
}

/// First `count` positive roots `b` of `2 D b J1(b a) + gamma J0(b a) = 0`.
///
/// `diffusion == 0` gives the Dirichlet family and `gamma_r == 0` the Neumann family.
pub fn robin_eigenvalues(a: f64, diffusion: f64, gamma_r: f64, count: usize) -> Result<Eigenvalues> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain("robin_eigenvalues", format!("radius must be positive, got {a:e}")));
    }
    if !(diffusion >= 0.0 && diffusion.is_finite() && gamma_r.is_finite()) {
        return Err(Error::domain(
            "robin_eigenvalues",
            format!("invalid coefficients D = {diffusion:e}, gamma = {gamma_r:e}"),
        ));
    }
    check_count(count)?;
    let scale = |xs: Vec<f64>| xs.into_iter().map(|x| x / a).collect::<Vec<_>>();
    let dirichlet = |fallback: bool| -> Result<Eigenvalues> {
        Ok(Eigenvalues {
            radius: a,
            family: EigenFamily::Dirichlet,
            values: scale(j0_positive_roots(count)?),
            fallback,
            constant_mode: false,
            modified_root: None,
        })
    };
    if diffusion == 0.0 {
        return dirichlet(false);
    }
    if gamma_r == 0.0 {
        return Ok(Eigenvalues {
            radius: a,
            family: EigenFamily::Neumann,
            values: scale(j1_positive_roots(count)?),
            fallback: false,
            constant_mode: true,
            modified_root: None,
        });
    }
    // In x = b a: f(x) = (2 D / a) x J1(x) + gamma J0(x).
    let c = 2.0 * diffusion / a;
    let f = move |x: f64| {
        let [j0, j1] = bessel::j01(x);
        c * x * j1 + gamma_r * j0
    };
    let df = move |x: f64| {
        let [j0, j1] = bessel::j01(x);
        c * x * j0 - gamma_r * j1
    };
    let roots = match roots_of(f, df, count) {
        Ok(r) => r,
        Err(_) => return dirichlet(true),
    };
    let modified_root = if gamma_r > 0.0 {
        modified_robin_root(c, gamma_r).map(|x| x / a)
    } else {
        None
    };
    Ok(Eigenvalues {
        radius: a,
        family: EigenFamily::Robin,
        values: scale(roots),
        fallback: false,
        constant_mode: false,
        modified_root,
    })
}

/// Root of `c x I1(x) - gamma I0(x)` in scaled form; unique for `gamma > 0`.
fn modified_robin_root(c: f64, gamma_r: f64) -> Option<f64> {
    let g = move |x: f64| {
        let [i0, i1] = bessel::i01_scaled(x);
        c * x * i1 - gamma_r * i0
    };
    let mut hi = 1.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return None;
        }
    }
    bisect_newton(g, None::<fn(f64) -> f64>, 0.0, hi).ok()
}
