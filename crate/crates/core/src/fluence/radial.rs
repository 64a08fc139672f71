use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::core::s_in;
use crate::error::{Error, Result};
use crate::params::OpticalProperties;
use crate::source::{Geometry, LaserProtocol};
use crate::specfun::{i01_scaled, jy01, k01_scaled};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialKind {
    /// `C J0(s r) + E Y0(s r)`, beta < 0.
    Oscillatory,
    /// `C I0(s r) + E K0(s r)`, beta > 0, stored scaled about the anchor.
    Modified,
    /// `C + E log(r / anchor)`, beta = 0.
    Logarithmic,
}

/// Solution of `(r R')' = beta r R` fixed by value and slope at an anchor radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialSolution {
    pub kind: RadialKind,
    pub beta: f64,
    /// Coefficients of the two elementary solutions. For `Modified` they are
    /// `C exp(s a)` and `E exp(-s a)` with `a` the anchor radius.
    pub coefficients: [f64; 2],
    pub anchor_radius: f64,
    pub anchor_value: f64,
    pub anchor_slope: f64,
}

impl RadialSolution {
    /// The solution with `R(anchor) = value` and `R'(anchor) = slope`.
    pub fn matching(beta: f64, anchor: f64, value: f64, slope: f64) -> Result<Self> {
        if !(anchor > 0.0 && anchor.is_finite()) || !beta.is_finite() {
            return Err(Error::domain(
                "radial solution",
                format!("anchor {anchor:e} must be positive and beta {beta:e} finite"),
            ));
        }
        let s = beta.abs().sqrt();
        let x = s * anchor;
        let (kind, coefficients) = if beta == 0.0 {
            (RadialKind::Logarithmic, [value, slope * anchor])
        } else if x == 0.0 || !x.is_finite() {
            return Err(Error::degenerate(
                "radial solution",
                format!("sqrt|beta| r = {x:e} cannot be evaluated"),
            ));
        } else if beta < 0.0 {
            let [j0, j1, y0, y1] = jy01(x)?;
            (
                RadialKind::Oscillatory,
                [
                    -FRAC_PI_2 * anchor * (slope * y0 + s * value * y1),
                    FRAC_PI_2 * anchor * (slope * j0 + s * value * j1),
                ],
            )
        } else {
            let [i0, i1] = i01_scaled(x)?;
            let [k0, k1] = k01_scaled(x)?;
            (
                RadialKind::Modified,
                [
                    anchor * (slope * k0 + s * value * k1),
                    anchor * (s * value * i1 - slope * i0),
                ],
            )
        };
        Ok(Self {
            kind,
            beta,
            coefficients,
            anchor_radius: anchor,
            anchor_value: value,
            anchor_slope: slope,
        })
    }

    fn s(&self) -> f64 {
        self.beta.abs().sqrt()
    }

    fn check(&self, r: f64) -> Result<()> {
        if r > 0.0 && r.is_finite() {
            Ok(())
        } else {
            Err(Error::domain("radial solution", format!("r = {r:e} must be positive")))
        }
    }

    /// R(r) and R'(r).
    pub fn value_and_slope(&self, r: f64) -> Result<(f64, f64)> {
        self.check(r)?;
        let [c, e] = self.coefficients;
        let s = self.s();
        Ok(match self.kind {
            RadialKind::Logarithmic => (c + e * (r / self.anchor_radius).ln(), e / r),
            RadialKind::Oscillatory => {
                let [j0, j1, y0, y1] = jy01(s * r)?;
                (c * j0 + e * y0, -s * (c * j1 + e * y1))
            }
            RadialKind::Modified => {
                let [i0, i1] = i01_scaled(s * r)?;
                let [k0, k1] = k01_scaled(s * r)?;
                let grow = (s * (r - self.anchor_radius)).exp();
                let decay = (-s * (r - self.anchor_radius)).exp();
                (
                    c * i0 * grow + e * k0 * decay,
                    s * (c * i1 * grow - e * k1 * decay),
                )
            }
        })
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        self.value_and_slope(r).map(|v| v.0)
    }

    pub fn derivative(&self, r: f64) -> Result<f64> {
        self.value_and_slope(r).map(|v| v.1)
    }

    pub fn zero(beta: f64, anchor: f64) -> Result<Self> {
        Self::matching(beta, anchor, 0.0, 0.0)
    }
}

/// beta1(zeta) = (zeta/nu + mu_a)/D - mu_t^2 for the inner tissue [1/m^2].
pub fn beta1(inner: &OpticalProperties, zeta: f64) -> f64 {
    let mt = inner.mu_t();
    (zeta / inner.nu() + inner.mu_a) / inner.diffusion() - mt * mt
}

/// beta2(zeta) = (zeta/nu^o + mu_a^o)/D^o - (mu_t^i)^2 [1/m^2], with the light speed of the
/// outer tissue so that the extension solves the outer equation.
pub fn beta2(inner: &OpticalProperties, outer: &OpticalProperties, zeta: f64) -> f64 {
    let mt = inner.mu_t();
    (zeta / outer.nu() + outer.mu_a) / outer.diffusion() - mt * mt
}

/// Extension for `r_f < r <= r_i` with `zeta = 0`: matches `anchor_value` at `r_f` with zero slope.
pub fn radial_particular(inner: &OpticalProperties, r_f: f64, anchor_value: f64) -> Result<RadialSolution> {
    let beta = beta1(inner, 0.0);
    if beta >= 0.0 {
        return Err(Error::domain(
            "radial_particular",
            format!("requires beta1(0) < 0, got {beta:e}"),
        ));
    }
    RadialSolution::matching(beta, r_f, anchor_value, 0.0)
}

/// Critical gamma_r at which `gamma log(r_i/r_f) = 2 D / r_i`.
pub fn critical_gamma(r_f: f64, r_i: f64, diffusion: f64) -> f64 {
    2.0 * diffusion / (r_i * (r_i / r_f).ln())
}

/// `R(r) = anchor - b0 log(r/r_f)` satisfying `-2 D R'(r_i) + gamma R(r_i) = 0`.
pub fn radial_general_log(anchor_value: f64, r_f: f64, r_i: f64, diffusion: f64, gamma_r: f64) -> Result<RadialSolution> {
    if !(0.0 < r_f && r_f < r_i) {
        return Err(Error::domain("radial_general_log", "need 0 < r_f < r_i"));
    }
    let log = (r_i / r_f).ln();
    let denom = gamma_r * log - 2.0 * diffusion / r_i;
    let scale = (gamma_r * log).abs().max(2.0 * diffusion / r_i);
    if denom.abs() <= 1e-12 * scale {
        return Err(Error::SingularRobin {
            gamma_r,
            critical: critical_gamma(r_f, r_i, diffusion),
        });
    }
    let b0 = gamma_r / denom * anchor_value;
    Ok(RadialSolution {
        kind: RadialKind::Logarithmic,
        beta: 0.0,
        coefficients: [anchor_value, -b0],
        anchor_radius: r_f,
        anchor_value,
        anchor_slope: -b0 / r_f,
    })
}

/// Continues `inner` past `r_i` into the outer tissue with `beta2(zeta)`, matching the value and
/// the flux `D^o R2' = D^i R1'` at `r_i`.
pub fn radial_outer(
    inner_solution: &RadialSolution,
    inner: &OpticalProperties,
    outer: &OpticalProperties,
    geometry: &Geometry,
    zeta: f64,
) -> Result<RadialSolution> {
    let (value, slope) = inner_solution
        .value_and_slope(geometry.r_i)
        .map_err(|e| e.context("inner extension at r_i"))?;
    let q = inner.diffusion() / outer.diffusion() * slope;
    RadialSolution::matching(beta2(inner, outer, zeta), geometry.r_i, value, q)
        .map_err(|e| e.context("outer extension"))
}

/// In-pulse field over `z <= ell` built from the core solution and the radial extensions:
/// `R1 e^{-mu_t z} + R3 e^{-mu_t z + zeta_in t}` in the tumor and `R2`, `R4` beyond `r_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InPulseExtension {
    pub s_in: f64,
    pub mu_t: f64,
    pub zeta_in: f64,
    pub geometry: Geometry,
    /// zeta = 0 part in the tumor, anchored at `-S_in`.
    pub r1: RadialSolution,
    /// zeta = zeta_in part in the tumor, anchored at `S_in`.
    pub r3: RadialSolution,
    pub r2: RadialSolution,
    pub r4: RadialSolution,
}

impl InPulseExtension {
    pub fn new(
        inner: &OpticalProperties,
        outer: &OpticalProperties,
        protocol: &LaserProtocol,
        geometry: &Geometry,
        gamma_r: f64,
    ) -> Result<Self> {
        let s = s_in(inner, protocol)?;
        let r1 = radial_particular(inner, geometry.r_f, -s)?;
        let r3 = radial_general_log(s, geometry.r_f, geometry.r_i, inner.diffusion(), gamma_r)?;
        let r2 = radial_outer(&r1, inner, outer, geometry, 0.0)?;
        let r4 = radial_outer(&r3, inner, outer, geometry, inner.zeta_in())?;
        Ok(Self {
            s_in: s,
            mu_t: inner.mu_t(),
            zeta_in: inner.zeta_in(),
            geometry: *geometry,
            r1,
            r3,
            r2,
            r4,
        })
    }

    /// Radial factors `(A(r), B(r))` with `phi = e^{-mu_t z} (A + B e^{zeta_in t})`.
    pub fn factors(&self, r: f64) -> Result<(f64, f64)> {
        let g = &self.geometry;
        if r <= g.r_f {
            Ok((-self.s_in, self.s_in))
        } else if r <= g.r_i {
            Ok((self.r1.value(r)?, self.r3.value(r)?))
        } else {
            Ok((self.r2.value(r)?, self.r4.value(r)?))
        }
    }

    /// Field value for `|z| <= ell`, `0 <= t <= t_p`.
    pub fn value(&self, r: f64, z: f64, t: f64) -> Result<f64> {
        let growth = self.zeta_in * t;
        super::core::guard_exponent("exp(zeta_in t)", growth)?;
        let decay = (-self.mu_t * z.abs()).exp();
        if r <= self.geometry.r_f {
            return Ok(decay * self.s_in * growth.exp_m1());
        }
        let (a, b) = self.factors(r)?;
        Ok(decay * (a + b * growth.exp()))
    }
}
