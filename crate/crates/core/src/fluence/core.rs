use crate::error::{Error, Result};
use crate::params::OpticalProperties;
use crate::source::{source_coefficient, LaserProtocol};

/// Largest `zeta t` accepted before exp(zeta t) is treated as overflow.
pub const EXPONENT_LIMIT: f64 = 700.0;

pub(crate) fn guard_exponent(what: &'static str, exponent: f64) -> Result<()> {
    if exponent > EXPONENT_LIMIT || exponent.is_nan() {
        return Err(Error::Overflow {
            what,
            exponent,
            limit: EXPONENT_LIMIT,
        });
    }
    Ok(())
}

/// S_in = S(r_f, 0, 0) / (D mu_t^2 - mu_a) [W/m^2].
pub fn s_in(optics: &OpticalProperties, protocol: &LaserProtocol) -> Result<f64> {
    let growth = optics.checked_growth_coefficient()?;
    Ok(source_coefficient(optics) * protocol.peak_irradiance() / growth)
}

/// In-pulse fluence in front of the fiber, `S_in exp(-mu_t z) (exp(zeta_in t) - 1)`.
///
/// Valid for `0 <= t <= t_p` (the value at `t_p` is the left limit) and `z >= 0`.
pub fn phi_in_pulse(optics: &OpticalProperties, protocol: &LaserProtocol, z: f64, t: f64) -> Result<f64> {
    if !(0.0..=protocol.t_p).contains(&t) {
        return Err(Error::domain(
            "phi_in_pulse",
            format!("t = {t:e} outside [0, t_p = {:e}]", protocol.t_p),
        ));
    }
    let s = s_in(optics, protocol)?;
    let exponent = optics.zeta_in() * t;
    guard_exponent("exp(zeta_in t)", exponent)?;
    Ok(s * (-optics.mu_t() * z.abs()).exp() * exponent.exp_m1())
}

/// u0 = S_in (exp(zeta_in t_p) - 1), the fluence at the end of a pulse at z = 0.
pub fn end_of_pulse_value(optics: &OpticalProperties, protocol: &LaserProtocol) -> Result<f64> {
    phi_in_pulse(optics, protocol, 0.0, protocol.t_p)
}
