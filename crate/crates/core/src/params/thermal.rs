use serde::Serialize;

use crate::error::{Error, Result};

/// Density of water [kg/m^3].
pub const RHO_WATER: f64 = 1000.0;

/// c_p = 1550 + 2800 (rho_w/rho) [J/kg/K].
pub fn specific_heat(rho_w_over_rho: f64) -> f64 {
    1550.0 + 2800.0 * rho_w_over_rho
}

/// k = 0.06 + 0.57 (rho_w/rho) [W/m/K].
pub fn conductivity(rho_w_over_rho: f64) -> f64 {
    0.06 + 0.57 * rho_w_over_rho
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalProperties {
    /// Density [kg/m^3].
    pub rho: f64,
    /// Initial perfusion [kg/m^3/s].
    pub omega0: f64,
    pub rho_w_over_rho: f64,
    /// Specific heat [J/kg/K].
    pub c_p: f64,
    /// Conductivity [W/m/K].
    pub k: f64,
}

impl ThermalProperties {
    pub fn new(rho: f64, omega0: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::domain("thermal properties", format!("rho must be > 0, got {rho:e}")));
        }
        if !(omega0 >= 0.0 && omega0.is_finite()) {
            return Err(Error::domain(
                "thermal properties",
                format!("omega0 must be >= 0, got {omega0:e}"),
            ));
        }
        let ratio = RHO_WATER / rho;
        Ok(Self {
            rho,
            omega0,
            rho_w_over_rho: ratio,
            c_p: specific_heat(ratio),
            k: conductivity(ratio),
        })
    }

    /// Volumetric heat capacity rho c_p [J/m^3/K].
    pub fn heat_capacity(&self) -> f64 {
        self.rho * self.c_p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BloodConstants {
    /// Density [kg/m^3].
    pub rho_b: f64,
    /// Specific heat [J/kg/K].
    pub c_b: f64,
    /// Arterial temperature [K].
    pub t_b: f64,
}

impl BloodConstants {
    pub const DEFAULT_T_B: f64 = 311.15;

    /// Blood with c_b from the same water-fraction law as tissue.
    pub fn new(rho_b: f64, t_b: f64) -> Result<Self> {
        if !(rho_b > 0.0 && rho_b.is_finite()) {
            return Err(Error::domain("blood", format!("rho_b must be > 0, got {rho_b:e}")));
        }
        if !(t_b > 0.0 && t_b.is_finite()) {
            return Err(Error::domain("blood", format!("T_b must be > 0 K, got {t_b:e}")));
        }
        Ok(Self {
            rho_b,
            c_b: specific_heat(RHO_WATER / rho_b),
            t_b,
        })
    }

    /// Volumetric flow w = omega0 / rho_b [1/s].
    pub fn w(&self, tissue: &ThermalProperties) -> f64 {
        tissue.omega0 / self.rho_b
    }

    /// c_b rho_b w [W/m^3/K] at t = 0.
    pub fn perfusion_coefficient(&self, tissue: &ThermalProperties) -> f64 {
        self.c_b * self.rho_b * self.w(tissue)
    }
}

impl Default for BloodConstants {
    fn default() -> Self {
        Self::new(1060.0, Self::DEFAULT_T_B).expect("valid blood constants")
    }
}

fn check_t_crit(t_crit: f64) -> Result<()> {
    if !(t_crit > 0.0) {
        return Err(Error::domain("zeta_thermal", format!("t_crit must be > 0, got {t_crit:e}")));
    }
    Ok(())
}

/// zeta(beta; t) = (k (beta + mu_t^2) - c_b rho_b w (1 - t/t_crit)) / (rho c_p) [1/s].
pub fn zeta_thermal(
    tissue: &ThermalProperties,
    blood: &BloodConstants,
    mu_t: f64,
    beta: f64,
    t: f64,
    t_crit: f64,
) -> Result<f64> {
    check_t_crit(t_crit)?;
    let perfusion = blood.perfusion_coefficient(tissue) * (1.0 - t / t_crit);
    Ok((tissue.k * (beta + mu_t * mu_t) - perfusion) / tissue.heat_capacity())
}

/// Clamped rate: zeta(beta; 0) before t_p, zeta(beta; t) on [t_p, t_crit), zeta(beta; t_crit) after.
pub fn zeta1(
    tissue: &ThermalProperties,
    blood: &BloodConstants,
    mu_t: f64,
    beta: f64,
    t: f64,
    t_p: f64,
    t_crit: f64,
) -> Result<f64> {
    let clamped = if t < t_p {
        0.0
    } else if t < t_crit {
        t
    } else {
        t_crit
    };
    zeta_thermal(tissue, blood, mu_t, beta, clamped, t_crit)
}

/// zeta0 = zeta(0; 0).
pub fn zeta0(tissue: &ThermalProperties, blood: &BloodConstants, mu_t: f64) -> f64 {
    (tissue.k * mu_t * mu_t - blood.perfusion_coefficient(tissue)) / tissue.heat_capacity()
}

/// Exact integral of zeta1(beta; .) over [0, t].
pub fn zeta1_integral(
    tissue: &ThermalProperties,
    blood: &BloodConstants,
    mu_t: f64,
    beta: f64,
    t: f64,
    t_p: f64,
    t_crit: f64,
) -> Result<f64> {
    check_t_crit(t_crit)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let rc = tissue.heat_capacity();
    let base = tissue.k * (beta + mu_t * mu_t) / rc;
    let p = blood.perfusion_coefficient(tissue) / rc;
    // zeta(t) = base - p (1 - t/t_crit)
    let z0 = base - p;
    let ramp = |a: f64, b: f64| (base - p) * (b - a) + p * (b * b - a * a) / (2.0 * t_crit);
    let mut total = z0 * t.min(t_p);
    if t > t_p && t_p < t_crit {
        total += ramp(t_p, t.min(t_crit));
    }
    let flat_from = t_p.max(t_crit);
    if t > flat_from {
        total += base * (t - flat_from);
    }
    Ok(total)
}
