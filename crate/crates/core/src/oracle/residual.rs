use serde::Serialize;

use crate::error::{Error, Result};

/// Rectangle `[r0, r1] x [z0, z1]` on which residuals are sampled; it must lie inside one
/// smooth piece of the field, one cell away from any jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub r0: f64,
    pub r1: f64,
    pub z0: f64,
    pub z1: f64,
}

/// Equation whose discretization is applied to the field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Equation {
    /// `(1/nu) phi_t - D lap phi + mu_a phi - S`.
    Light { nu: f64, d: f64, mu_a: f64 },
    /// `rho c_p theta_t - k lap theta + perfusion theta - q`, with `theta = T - T_b`.
    Bioheat { heat_capacity: f64, k: f64, perfusion: f64 },
}

impl Equation {
    fn coefficients(&self) -> (f64, f64, f64) {
        match *self {
            Equation::Light { nu, d, mu_a } => (1.0 / nu, d, mu_a),
            Equation::Bioheat { heat_capacity, k, perfusion } => (heat_capacity, k, perfusion),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelResidual {
    /// Cells per side.
    pub n: usize,
    /// Radial spacing [m].
    pub h: f64,
    pub max: f64,
    /// r-weighted RMS over the window.
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub levels: Vec<LevelResidual>,
    /// Least-squares slope of ln(l2) against ln(h).
    pub order: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_order(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Applies the five-point cylindrical stencil and a fourth-order time difference to `field`
/// at the cell centres of `n x n` grids over `window`, one grid per entry of `levels`.
pub fn residual_of<F, S>(
    field: F,
    source: S,
    equation: Equation,
    window: Window,
    t: f64,
    levels: &[usize],
) -> Result<ResidualReport>
where
    F: Fn(f64, f64, f64) -> Result<f64>,
    S: Fn(f64, f64, f64) -> f64,
{
    if !(window.r1 > window.r0 && window.r0 >= 0.0 && window.z1 > window.z0) {
        return Err(Error::domain("residual_of", format!("empty window {window:?}")));
    }
    if !(t > 0.0) {
        return Err(Error::domain("residual_of", format!("t must be > 0, got {t:e}")));
    }
    let (cap, cond, sink) = equation.coefficients();
    let dt = 1e-3 * t;
    let mut out = Vec::with_capacity(levels.len());
    for &n in levels {
        let hr = (window.r1 - window.r0) / n as f64;
        let hz = (window.z1 - window.z0) / n as f64;
        let (mut max, mut sum, mut weight) = (0.0f64, 0.0, 0.0);
        for j in 0..n {
            let z = window.z0 + (j as f64 + 0.5) * hz;
            for i in 0..n {
                let r = window.r0 + (i as f64 + 0.5) * hr;
                let c = field(r, z, t)?;
                let (re, rw) = (r + 0.5 * hr, r - 0.5 * hr);
                let radial = (re * (field(r + hr, z, t)? - c) - rw * (c - field(r - hr, z, t)?)) / (r * hr * hr);
                let axial = (field(r, z + hz, t)? - 2.0 * c + field(r, z - hz, t)?) / (hz * hz);
                let dudt = (-field(r, z, t + 2.0 * dt)? + 8.0 * field(r, z, t + dt)? - 8.0 * field(r, z, t - dt)?
                    + field(r, z, t - 2.0 * dt)?)
                    / (12.0 * dt);
                let res = cap * dudt - cond * (radial + axial) + sink * c - source(r, z, t);
                max = max.max(res.abs());
                sum += res * res * r;
                weight += r;
            }
        }
        out.push(LevelResidual {
            n,
            h: hr,
            max,
            l2: (sum / weight).sqrt(),
        });
    }
    let hs: Vec<f64> = out.iter().map(|l| l.h).collect();
    let l2: Vec<f64> = out.iter().map(|l| l.l2).collect();
    let order = if out.len() >= 2 { fit_order(&hs, &l2) } else { f64::NAN };
    Ok(ResidualReport { levels: out, order })
}
