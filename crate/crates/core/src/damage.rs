//! Arrhenius damage integral and critical time.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{integrate_fallible, Tolerance};

/// Temperatures below this are rejected as nonphysical [K].
pub const MIN_TEMPERATURE: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArrheniusParams {
    /// Frequency factor [1/s].
    pub a: f64,
    /// Activation energy [J/mol].
    pub e_a: f64,
    /// Gas constant [J/mol/K].
    pub r: f64,
}

impl Default for ArrheniusParams {
    fn default() -> Self {
        Self {
            a: 1.7e91,
            e_a: 5.67e5,
            r: 8.314,
        }
    }
}

impl ArrheniusParams {
    pub fn new(a: f64, e_a: f64, r: f64) -> Result<Self> {
        if !(a > 0.0 && e_a > 0.0 && r > 0.0 && a.is_finite() && e_a.is_finite() && r.is_finite()) {
            return Err(Error::domain(
                "Arrhenius parameters",
                format!("A, E_a and R must be positive, got {a:e}, {e_a:e}, {r:e}"),
            ));
        }
        Ok(Self { a, e_a, r })
    }

    /// ln of the damage rate A exp(-E_a / (R T)).
    pub fn log_rate(&self, temperature: f64) -> Result<f64> {
        if !(temperature >= MIN_TEMPERATURE && temperature.is_finite()) {
            return Err(Error::domain(
                "damage integral",
                format!("temperature {temperature} K is below {MIN_TEMPERATURE} K or not finite"),
            ));
        }
        Ok(self.a.ln() - self.e_a / (self.r * temperature))
    }

    pub fn rate(&self, temperature: f64) -> Result<f64> {
        self.log_rate(temperature).map(f64::exp)
    }

    /// Time to reach damage 1 at constant temperature, (1/A) exp(E_a / (R T)).
    pub fn constant_temperature_time(&self, temperature: f64) -> Result<f64> {
        self.log_rate(temperature).map(|l| (-l).exp())
    }
}

fn tolerance() -> Tolerance {
    Tolerance::new(1e-300, 1e-11)
}

/// Omega over `[t0, t1]` of the trajectory, split at `breakpoints`.
fn damage_between<F>(params: &ArrheniusParams, trajectory: &F, t0: f64, t1: f64, breakpoints: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if t1 <= t0 {
        return Ok(0.0);
    }
    let est = integrate_fallible(|s| params.rate(trajectory(s)), t0, t1, breakpoints, tolerance())?;
    Ok(est.value)
}

/// Damage indicator Omega(t) = int_0^t A exp(-E_a / (R T(s))) ds.
pub fn damage_integral<F>(params: &ArrheniusParams, trajectory: F, t: f64, breakpoints: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(t >= 0.0) {
        return Err(Error::domain("damage integral", format!("t must be >= 0, got {t:e}")));
    }
    damage_between(params, &trajectory, 0.0, t, breakpoints)
}

/// First time Omega reaches 1, searched on `[0, horizon]`.
pub fn critical_time<F>(params: &ArrheniusParams, trajectory: F, horizon: f64, breakpoints: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let total = damage_integral(params, &trajectory, horizon, breakpoints)?;
    if total < 1.0 {
        return Err(Error::HorizonExceeded {
            horizon,
            reached: total,
        });
    }
    // Omega(lo) < 1 <= Omega(hi); each step integrates only the new piece.
    let (mut lo, mut hi) = (0.0, horizon);
    let mut omega_lo = 0.0;
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let omega_mid = omega_lo + damage_between(params, &trajectory, lo, mid, breakpoints)?;
        if omega_mid < 1.0 {
            lo = mid;
            omega_lo = omega_mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish from lo using dOmega/dt = rate(T(lo)).
    let rate = params.rate(trajectory(lo))?;
    if rate > 0.0 {
        let step = lo + (1.0 - omega_lo) / rate;
        if step >= lo && step <= hi {
            return Ok(step);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// (1/A) exp(E_a/(R T_max)) <= t_crit <= (1/A) exp(E_a/(R T_min)).
pub fn critical_time_bounds(params: &ArrheniusParams, t_min: f64, t_max: f64) -> Result<(f64, f64)> {
    if !(t_min > 0.0 && t_min <= t_max) {
        return Err(Error::domain(
            "critical_time_bounds",
            format!("need 0 < T_min <= T_max, got {t_min}, {t_max}"),
        ));
    }
    Ok((
        params.constant_temperature_time(t_max)?,
        params.constant_temperature_time(t_min)?,
    ))
}
