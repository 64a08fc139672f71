//! Pulse train, irradiance and the Beer-Lambert photon source.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::OpticalProperties;

/// Radii and lengths of the two-tissue cylinder [m].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geometry {
    /// Fiber radius.
    pub r_f: f64,
    /// Tumor radius.
    pub r_i: f64,
    /// Outer radius of the healthy shell.
    pub r_o: f64,
    /// Half active length of the tumor.
    pub ell: f64,
    /// Axial extent of the domain.
    pub l: f64,
}

impl Geometry {
    pub fn new(r_f: f64, r_i: f64, r_o: f64, ell: f64, l: f64) -> Result<Self> {
        let ok = r_f > 0.0 && r_f < r_i && r_i < r_o && r_o.is_finite() && ell > 0.0 && ell < l && l.is_finite();
        if !ok {
            return Err(Error::domain(
                "geometry",
                format!("need 0 < r_f < r_i < r_o and 0 < ell < L, got r_f={r_f:e}, r_i={r_i:e}, r_o={r_o:e}, ell={ell:e}, L={l:e}"),
            ));
        }
        Ok(Self { r_f, r_i, r_o, ell, l })
    }

    pub fn with_r_o(self, r_o: f64) -> Result<Self> {
        Self::new(self.r_f, self.r_i, r_o, self.ell, self.l)
    }

    /// Region containing `(r, |z|)`; boundaries belong to the inner side.
    pub fn region(&self, r: f64, z: f64) -> Region {
        let z = z.abs();
        if z > self.ell {
            Region::AxialOuter
        } else if r <= self.r_f {
            Region::Core
        } else if r <= self.r_i {
            Region::Tumor
        } else {
            Region::RadialOuter
        }
    }

    pub fn contains(&self, r: f64, z: f64) -> bool {
        r >= 0.0 && r <= self.r_o && z.abs() <= self.l
    }
}

impl Default for Geometry {
    fn default() -> Self {
        Self::new(2.5e-4, 1e-2, 2e-2, 5e-3, 2e-2).expect("valid default geometry")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `r <= r_f`, `|z| <= ell`: the column in front of the fiber.
    Core,
    /// `r_f < r <= r_i`, `|z| <= ell`.
    Tumor,
    /// `r > r_i`, `|z| <= ell`.
    RadialOuter,
    /// `|z| > ell`.
    AxialOuter,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::Core => "core",
            Region::Tumor => "tumor",
            Region::RadialOuter => "radial_outer",
            Region::AxialOuter => "axial_outer",
        }
    }

    /// True when the region is tumor tissue.
    pub fn is_inner(self) -> bool {
        matches!(self, Region::Core | Region::Tumor)
    }
}

/// Where `t` falls in the pulse train.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Phase {
    /// Inside pulse `index`, `local` seconds after its start.
    Pulse { index: usize, local: f64 },
    /// After pulse `index` ended, `local` seconds after its start (so `local >= t_p`).
    Gap { index: usize, local: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaserProtocol {
    /// Peak power [W].
    pub power: f64,
    /// Wavelength [nm].
    pub lambda_nm: f64,
    /// Pulse width [s].
    pub t_p: f64,
    /// Interval between pulses [s].
    pub delta_t: f64,
    /// Exposure duration [s].
    pub t_end: f64,
    /// Fiber radius [m].
    pub r_f: f64,
    /// Number of pulses.
    pub pulses: usize,
}

impl LaserProtocol {
    /// Validates that `(t_end + delta_t) / (t_p + delta_t)` is a positive integer.
    pub fn new(power: f64, lambda_nm: f64, t_p: f64, delta_t: f64, t_end: f64, r_f: f64) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain("laser protocol", format!("{name} must be > 0, got {v:e}")))
            }
        };
        positive("power", power)?;
        positive("wavelength", lambda_nm)?;
        positive("t_p", t_p)?;
        positive("t_end", t_end)?;
        positive("r_f", r_f)?;
        if !(delta_t >= 0.0 && delta_t.is_finite()) {
            return Err(Error::domain("laser protocol", format!("delta_t must be >= 0, got {delta_t:e}")));
        }
        let n = (t_end + delta_t) / (t_p + delta_t);
        let rounded = n.round();
        if rounded < 1.0 || (n - rounded).abs() > 1e-9 * rounded {
            return Err(Error::domain(
                "laser protocol",
                format!("(t_end + delta_t)/(t_p + delta_t) = {n} is not a positive integer"),
            ));
        }
        Ok(Self {
            power,
            lambda_nm,
            t_p,
            delta_t,
            t_end,
            r_f,
            pulses: rounded as usize,
        })
    }

    /// Protocol with `pulses` pulses and `t_end` derived.
    pub fn with_pulses(power: f64, lambda_nm: f64, t_p: f64, delta_t: f64, pulses: usize, r_f: f64) -> Result<Self> {
        if pulses == 0 {
            return Err(Error::domain("laser protocol", "at least one pulse is required"));
        }
        let t_end = (pulses - 1) as f64 * (t_p + delta_t) + t_p;
        let mut p = Self::new(power, lambda_nm, t_p, delta_t, t_end, r_f)?;
        p.pulses = pulses;
        Ok(p)
    }

    pub fn period(&self) -> f64 {
        self.t_p + self.delta_t
    }

    pub fn pulse_start(&self, j: usize) -> f64 {
        j as f64 * self.period()
    }

    /// Pulse-train position of `t >= 0`. The pulse end `t_j + t_p` counts as in the gap.
    pub fn phase(&self, t: f64) -> Phase {
        let period = self.period();
        let mut index = (t / period).floor().max(0.0) as usize;
        if index >= self.pulses {
            index = self.pulses - 1;
        }
        let local = t - self.pulse_start(index);
        if local < self.t_p {
            Phase::Pulse { index, local }
        } else {
            Phase::Gap { index, local }
        }
    }

    /// True when `t` lies in some closed interval `[t_j, t_j + t_p]`.
    pub fn is_on(&self, t: f64) -> bool {
        if !(0.0..=self.t_end).contains(&t) {
            return false;
        }
        let index = ((t / self.period()).floor() as usize).min(self.pulses - 1);
        t - self.pulse_start(index) <= self.t_p
    }

    /// Peak irradiance P / (pi r_f^2) [W/m^2].
    pub fn peak_irradiance(&self) -> f64 {
        self.power / (PI * self.r_f * self.r_f)
    }
}

/// E(r, t) [W/m^2].
pub fn irradiance(protocol: &LaserProtocol, r: f64, t: f64) -> f64 {
    if r <= protocol.r_f && protocol.is_on(t) {
        protocol.peak_irradiance()
    } else {
        0.0
    }
}

/// mu_s (mu_t + g mu_a) / (mu_a + mu_s'): the factor multiplying `E exp(-mu_t z)`.
pub fn source_coefficient(optics: &OpticalProperties) -> f64 {
    optics.mu_s() * (optics.mu_t() + optics.g * optics.mu_a) / (optics.mu_a + optics.mu_s_prime())
}

/// S(r, z, t) [W/m^3] for a single tissue; `z >= 0` measured from the tip.
pub fn scattered_source(optics: &OpticalProperties, protocol: &LaserProtocol, r: f64, z: f64, t: f64) -> f64 {
    let e = irradiance(protocol, r, t);
    if e == 0.0 {
        return 0.0;
    }
    source_coefficient(optics) * e * (-optics.mu_t() * z).exp()
}

/// S1(r, z) = g / (mu_t + g mu_a) S(r, z, t_p) [W/m^2].
pub fn boundary_source_s1(optics: &OpticalProperties, protocol: &LaserProtocol, r: f64, z: f64) -> f64 {
    optics.g / (optics.mu_t() + optics.g * optics.mu_a) * scattered_source(optics, protocol, r, z, 0.0)
}

/// S2(r, z, t) = mu_s E exp(-mu_t z) [W/m^3]; with S1 it splits S as `-d S1/dz + S2`.
pub fn source_s2(optics: &OpticalProperties, protocol: &LaserProtocol, r: f64, z: f64, t: f64) -> f64 {
    optics.mu_s() * irradiance(protocol, r, t) * (-optics.mu_t() * z).exp()
}

/// Source over the two-tissue geometry; the tissue is chosen by region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoTissueSource {
    pub inner: OpticalProperties,
    pub outer: OpticalProperties,
    pub protocol: LaserProtocol,
    pub geometry: Geometry,
}

impl TwoTissueSource {
    pub fn optics_at(&self, r: f64, z: f64) -> &OpticalProperties {
        if self.geometry.region(r, z).is_inner() {
            &self.inner
        } else {
            &self.outer
        }
    }

    /// S(r, z, t), even in z.
    pub fn value(&self, r: f64, z: f64, t: f64) -> f64 {
        scattered_source(self.optics_at(r, z), &self.protocol, r, z.abs(), t)
    }

    /// Source at `z = ell` evaluated with the inner and outer tissue, during a pulse.
    pub fn interface_jump(&self, r: f64) -> (f64, f64) {
        let z = self.geometry.ell;
        (
            scattered_source(&self.inner, &self.protocol, r, z, 0.0),
            scattered_source(&self.outer, &self.protocol, r, z, 0.0),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn breast_tumor(g: f64) -> OpticalProperties {
        OpticalProperties::new(8.0, 2070.0, 1.487, g, 1.4, 810.0).unwrap()
    }

    fn protocol() -> LaserProtocol {
        LaserProtocol::with_pulses(5.0, 810.0, 1e-12, 1e-11, 3, 2.5e-4).unwrap()
    }

    #[test]
    fn pulse_count_must_be_integer() {
        assert!(LaserProtocol::new(5.0, 810.0, 1e-12, 1e-11, 1e-12, 2.5e-4).is_ok());
        assert_eq!(LaserProtocol::new(5.0, 810.0, 1e-12, 1e-11, 12e-12, 2.5e-4).unwrap().pulses, 2);
        assert!(LaserProtocol::new(5.0, 810.0, 1e-12, 1e-11, 5e-12, 2.5e-4).is_err());
        assert!(LaserProtocol::new(-5.0, 810.0, 1e-12, 1e-11, 1e-12, 2.5e-4).is_err());
    }

    #[test]
    fn pulse_starts_and_phase() {
        let p = protocol();
        assert!((p.pulse_start(2) - 22e-12).abs() < 1e-25);
        assert!(matches!(p.phase(0.5e-12), Phase::Pulse { index: 0, .. }));
        assert!(matches!(p.phase(5e-12), Phase::Gap { index: 0, .. }));
        assert!(matches!(p.phase(11.5e-12), Phase::Pulse { index: 1, .. }));
    }

    #[test]
    fn irradiance_examples() {
        let p = protocol();
        assert_eq!(irradiance(&p, 2.0 * p.r_f, 0.0), 0.0);
        assert_eq!(irradiance(&p, 0.0, p.t_p + p.delta_t / 2.0), 0.0);
        let e = irradiance(&p, 0.0, 0.0);
        assert!((e - 2.546_479_089_470_325e7).abs() < 1e-3);
        assert_eq!(irradiance(&p, p.r_f, p.t_p), e);
        assert_eq!(irradiance(&p, 0.0, p.t_end * 2.0), 0.0);
    }

    #[test]
    fn s1_vanishes_without_anisotropy() {
        let o = breast_tumor(0.0);
        assert_eq!(boundary_source_s1(&o, &protocol(), 0.0, 1e-3), 0.0);
    }

    #[test]
    fn s1_ratio_is_constant() {
        let o = breast_tumor(0.9);
        let p = protocol();
        let want = 0.9 / (o.mu_t() + 0.9 * o.mu_a);
        for (r, z) in [(0.0, 0.0), (1e-4, 2e-4), (2.5e-4, 1e-3)] {
            let ratio = boundary_source_s1(&o, &p, r, z) / scattered_source(&o, &p, r, z, 0.0);
            assert!((ratio - want).abs() <= 1e-14 * want);
        }
    }

    #[test]
    fn region_boundaries_resolve_inward() {
        let g = Geometry::default();
        assert_eq!(g.region(g.r_f, 0.0), Region::Core);
        assert_eq!(g.region(g.r_i, g.ell), Region::Tumor);
        assert_eq!(g.region(g.r_i * 1.0001, 0.0), Region::RadialOuter);
        assert_eq!(g.region(0.0, -g.ell * 1.0001), Region::AxialOuter);
    }

    proptest! {
        #[test]
        fn decomposition_identity(z in 0.0f64..5e-3, g in 0.7f64..0.99, r in 0.0f64..2.5e-4) {
            let o = breast_tumor(g);
            let p = protocol();
            let s = scattered_source(&o, &p, r, z, 0.0);
            let ds1_dz = -o.mu_t() * boundary_source_s1(&o, &p, r, z);
            let rebuilt = -ds1_dz + source_s2(&o, &p, r, z, 0.0);
            prop_assert!((rebuilt - s).abs() <= 1e-10 * s.abs());
        }

        #[test]
        fn beer_lambert_and_monotone(z in 0.0f64..5e-3, dz in 1e-7f64..1e-3) {
            let o = breast_tumor(0.9);
            let p = protocol();
            let s0 = scattered_source(&o, &p, 0.0, 0.0, 0.0);
            let s = scattered_source(&o, &p, 0.0, z, 0.0);
            prop_assert!((s / s0 - (-o.mu_t() * z).exp()).abs() <= 1e-12);
            let s2 = scattered_source(&o, &p, 0.0, z + dz, 0.0);
            prop_assert!(s2 < s || s == 0.0);
        }

        #[test]
        fn off_between_pulses(frac in 0.001f64..0.999, j in 0usize..3) {
            let p = protocol();
            let t = p.pulse_start(j) + p.t_p + frac * p.delta_t;
            prop_assert_eq!(irradiance(&p, 0.0, t), 0.0);
            prop_assert_eq!(scattered_source(&breast_tumor(0.9), &p, 0.0, 0.0, t), 0.0);
        }
    }
}
