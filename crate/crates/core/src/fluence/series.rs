use std::f64::consts::PI;

use serde::Serialize;

use super::core::guard_exponent;
use crate::error::{Error, Result};
use crate::params::OpticalProperties;
use crate::source::{source_coefficient, Geometry, LaserProtocol};
use crate::specfun::{j0, j1, j0_positive_roots, robin_eigenvalues, EigenFamily, Eigenvalues};

pub const DEFAULT_TERMS: usize = 64;
/// Terms stop once `|c_n| max|J0| < COEFFICIENT_CUTOFF |u0|`.
pub const COEFFICIENT_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesFamily {
    /// `J0(b a) = 0` on the disk edge.
    Dirichlet,
    /// `2 D b J1(b a) + gamma J0(b a) = 0` with the inner diffusion coefficient.
    Robin,
}

/// Fourier-Bessel expansion of the end-of-pulse profile `u0 exp(-mu_t z)` on the disk `r <= a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSolution {
    /// Disk radius `a`.
    pub radius: f64,
    pub u0: f64,
    pub mu_t: f64,
    pub eigen: Eigenvalues,
    /// Eigenvalues `b_n` actually used, including `b = 0` for a constant mode.
    pub b: Vec<f64>,
    /// Decay rates `zeta_n = zeta_in - nu D b_n^2`.
    pub zeta: Vec<f64>,
    pub c: Vec<f64>,
    /// `int_0^a r J0(b_n r)^2 dr`.
    pub norms: Vec<f64>,
    /// 1-based indices of terms with `zeta_n >= 0` (not decaying).
    pub growing: Vec<usize>,
    /// `sqrt(||u0||^2 - sum c_n^2 N_n)` in the `r dr` norm on the disk.
    pub parseval_remainder: f64,
    /// Upper bound on the radial L2 truncation error (`r dr` norm).
    pub tail_bound: f64,
}

/// `int_0^a r J0(p r) J0(q r) dr`.
pub(crate) fn bessel_overlap(a: f64, p: f64, q: f64) -> f64 {
    let (jp0, jp1) = (j0(p * a), j1(p * a));
    if p == q {
        return 0.5 * a * a * (jp0 * jp0 + jp1 * jp1);
    }
    let (jq0, jq1) = (j0(q * a), j1(q * a));
    a * (p * jp1 * jq0 - q * jp0 * jq1) / (p * p - q * q)
}

/// `int_0^a r J0(b r) dr`.
pub(crate) fn bessel_moment(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.5 * a * a
    } else {
        a / b * j1(b * a)
    }
}

/// Coefficient `u0 (2/(b a)) J1(b a) / (J0(b a)^2 + J1(b a)^2)`.
pub fn fourier_bessel_coefficient(u0: f64, b: f64, a: f64) -> f64 {
    if b == 0.0 {
        return u0;
    }
    let x = b * a;
    let (c0, c1) = (j0(x), j1(x));
    u0 * 2.0 / x * c1 / (c0 * c0 + c1 * c1)
}

pub fn interpulse_series(
    inner: &OpticalProperties,
    geometry: &Geometry,
    protocol: &LaserProtocol,
    gamma_r: f64,
    family: SeriesFamily,
    term_count: usize,
) -> Result<SeriesSolution> {
    if term_count == 0 {
        return Err(Error::domain("interpulse_series", "term_count must be at least 1"));
    }
    let u0 = super::core::end_of_pulse_value(inner, protocol)?;
    let a = geometry.r_f;
    let eigen = match family {
        SeriesFamily::Dirichlet => Eigenvalues {
            radius: a,
            family: EigenFamily::Dirichlet,
            values: j0_positive_roots(term_count)?.into_iter().map(|x| x / a).collect(),
            fallback: false,
            constant_mode: false,
            modified_root: None,
        },
        SeriesFamily::Robin => robin_eigenvalues(a, inner.diffusion(), gamma_r, term_count)?,
    };
    let mut candidates = Vec::with_capacity(term_count + 1);
    if eigen.constant_mode {
        candidates.push(0.0);
    }
    candidates.extend(eigen.values.iter().copied());
    candidates.truncate(term_count);

    let zeta_in = inner.zeta_in();
    let nu_d = inner.nu() * inner.diffusion();
    let (mut b, mut zeta, mut c, mut norms, mut growing) = (vec![], vec![], vec![], vec![], vec![]);
    for bn in candidates {
        let cn = fourier_bessel_coefficient(u0, bn, a);
        let zn = zeta_in - nu_d * bn * bn;
        b.push(bn);
        zeta.push(zn);
        c.push(cn);
        norms.push(bessel_overlap(a, bn, bn));
        if zn >= 0.0 {
            growing.push(b.len());
        }
        if cn.abs() < COEFFICIENT_CUTOFF * u0.abs() && !eigen.constant_mode {
            break;
        }
    }
    let total = u0 * u0 * a * a / 2.0;
    let captured: f64 = c.iter().zip(&norms).map(|(c, n)| c * c * n).sum();
    let parseval_remainder = (total - captured).max(0.0).sqrt();
    let tail_bound = match eigen.family {
        // c_n^2 N_n = 2 u0^2 / b_n^2 and j_{0,n} > (n - 1/4) pi.
        EigenFamily::Dirichlet => {
            let n = b.len() as f64;
            (2.0 * u0 * u0 * a * a / (PI * PI * (n - 0.25))).sqrt()
        }
        _ => parseval_remainder * (1.0 + 1e-9) + 1e-14 * u0.abs() * a,
    };
    Ok(SeriesSolution {
        radius: a,
        u0,
        mu_t: inner.mu_t(),
        eigen,
        b,
        zeta,
        c,
        norms,
        growing,
        parseval_remainder,
        tail_bound,
    })
}

impl SeriesSolution {
    pub fn terms(&self) -> usize {
        self.c.len()
    }

    /// `sum c_n J0(b_n r) exp(zeta_n tau)` using the first `terms` terms.
    pub fn radial_sum_truncated(&self, r: f64, tau: f64, terms: usize) -> Result<f64> {
        // every Dirichlet eigenfunction vanishes on the rim
        if self.eigen.family == EigenFamily::Dirichlet && r >= self.radius {
            return Ok(0.0);
        }
        let mut sum = 0.0;
        for n in 0..terms.min(self.terms()) {
            let e = self.zeta[n] * tau;
            guard_exponent("exp(zeta_n (t - t_p))", e)?;
            sum += self.c[n] * j0(self.b[n] * r) * e.exp();
        }
        Ok(sum)
    }

    pub fn radial_sum(&self, r: f64, tau: f64) -> Result<f64> {
        self.radial_sum_truncated(r, tau, self.terms())
    }

    /// Inner-region value for `r <= a`, `|z| <= ell`, `tau = t - t_j - t_p >= 0`.
    pub fn value(&self, r: f64, z: f64, tau: f64) -> Result<f64> {
        Ok(self.radial_sum(r, tau)? * (-self.mu_t * z.abs()).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxialBranch {
    /// `sinh(eta (L - z)) / sinh(eta (L - ell))`, `eta^2 > 0`.
    Sinh,
    /// `sin(eta (L - z)) / sin(eta (L - ell))`, `eta^2 < 0`.
    Sin,
    /// `(L - z) / (L - ell)`, `eta = 0`.
    Linear,
}

/// Continuation of the series into `ell <= |z| <= L` for `r <= r_f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxialContinuation {
    pub ell: f64,
    pub l: f64,
    /// Inner `mu_t`, so `Z_n(ell) = exp(-mu_t ell)`.
    pub mu_t: f64,
    pub eta: Vec<f64>,
    pub branch: Vec<AxialBranch>,
    /// Scalar fixed by the Robin condition at `z = ell`.
    pub z_ell: f64,
}

impl AxialContinuation {
    /// `Z_n(z) / exp(-mu_t ell)`.
    fn shape(&self, n: usize, z: f64) -> f64 {
        let (eta, l, ell) = (self.eta[n], self.l, self.ell);
        match self.branch[n] {
            AxialBranch::Sinh => {
                // sinh ratio in a form that stays finite for large eta
                (-eta * (z - ell)).exp() * (-2.0 * eta * (l - z)).exp_m1() / (-2.0 * eta * (l - ell)).exp_m1()
            }
            AxialBranch::Sin => (eta * (l - z)).sin() / (eta * (l - ell)).sin(),
            AxialBranch::Linear => (l - z) / (l - ell),
        }
    }

    /// Per-term axial factor `Z_n(z)` for `ell <= z <= L`.
    pub fn factor(&self, n: usize, z: f64) -> f64 {
        (-self.mu_t * self.ell).exp() * self.shape(n, z)
    }

    /// `-Z_n'(ell) / Z_n(ell)`.
    fn log_slope(&self, n: usize) -> f64 {
        let (eta, h) = (self.eta[n], self.l - self.ell);
        match self.branch[n] {
            AxialBranch::Sinh => eta / (eta * h).tanh(),
            AxialBranch::Sin => eta / (eta * h).tan(),
            AxialBranch::Linear => 1.0 / h,
        }
    }

    pub fn value(&self, series: &SeriesSolution, r: f64, z: f64, tau: f64) -> Result<f64> {
        let z = z.abs();
        let mut sum = 0.0;
        for n in 0..series.terms() {
            let e = series.zeta[n] * tau;
            guard_exponent("exp(zeta_n (t - t_p))", e)?;
            sum += series.c[n] * j0(series.b[n] * r) * self.factor(n, z) * e.exp();
        }
        Ok(self.z_ell * sum)
    }

    /// Robin residual `-D^o dphi/dz + gamma phi + S1` at `z = ell`, `t = t_p`, radius `r`.
    pub fn robin_residual(&self, series: &SeriesSolution, d_outer: f64, gamma_r: f64, s1: f64, r: f64) -> f64 {
        let e = (-self.mu_t * self.ell).exp();
        let mut g = 0.0;
        for n in 0..series.terms() {
            g += series.c[n] * j0(series.b[n] * r) * (d_outer * self.log_slope(n) + gamma_r);
        }
        self.z_ell * e * g + s1
    }
}

/// Builds the axial factors and fixes `Z_ell` by least squares of the Robin condition
/// `-D^o dphi/dz + gamma phi = -S1` over the disk at `t = t_p`.
pub fn axial_continuation(
    series: &SeriesSolution,
    geometry: &Geometry,
    inner: &OpticalProperties,
    outer: &OpticalProperties,
    protocol: &LaserProtocol,
    gamma_r: f64,
) -> Result<AxialContinuation> {
    let d_o = outer.diffusion();
    let nu = outer.nu();
    let h = geometry.l - geometry.ell;
    let mut eta = Vec::with_capacity(series.terms());
    let mut branch = Vec::with_capacity(series.terms());
    for n in 0..series.terms() {
        let b = series.b[n];
        let eta2 = (series.zeta[n] / nu + outer.mu_a) / d_o + b * b;
        let (e, br) = if eta2 > 0.0 {
            (eta2.sqrt(), AxialBranch::Sinh)
        } else if eta2 < 0.0 {
            let e = (-eta2).sqrt();
            if (e * h).sin().abs() < 1e-12 {
                return Err(Error::Resonance { n: n + 1 });
            }
            (e, AxialBranch::Sin)
        } else {
            (0.0, AxialBranch::Linear)
        };
        eta.push(e);
        branch.push(br);
    }
    let mut axial = AxialContinuation {
        ell: geometry.ell,
        l: geometry.l,
        mu_t: inner.mu_t(),
        eta,
        branch,
        z_ell: 0.0,
    };
    // G(r) = e^{-mu_t ell} sum c_n w_n J0(b_n r); S1 on the disk is s1 = k e^{-mu_t ell}.
    let a = series.radius;
    let w: Vec<f64> = (0..series.terms())
        .map(|n| series.c[n] * (d_o * axial.log_slope(n) + gamma_r))
        .collect();
    let mut cross = 0.0;
    for m in 0..w.len() {
        for n in 0..w.len() {
            cross += w[m] * w[n] * bessel_overlap(a, series.b[m], series.b[n]);
        }
    }
    let moment: f64 = (0..w.len()).map(|n| w[n] * bessel_moment(a, series.b[n])).sum();
    if !(cross > 0.0) || !cross.is_finite() {
        return Err(Error::degenerate("Z_ell", format!("Robin projection norm is {cross:e}")));
    }
    let k = inner.g / (inner.mu_t() + inner.g * inner.mu_a) * source_coefficient(inner) * protocol.peak_irradiance();
    axial.z_ell = -k * moment / cross;
    Ok(axial)
}
