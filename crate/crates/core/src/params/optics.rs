use serde::Serialize;

use crate::error::{Error, Result};

/// Speed of light in vacuum [m/s].
pub const LIGHT_SPEED: f64 = 3.0e8;
/// Reference wavelength of the scattering power law [nm].
pub const REFERENCE_WAVELENGTH_NM: f64 = 500.0;
/// Relative tolerance under which `D mu_t^2 - mu_a` counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Optical properties of one tissue at one wavelength, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpticalProperties {
    /// Absorption coefficient [1/m].
    pub mu_a: f64,
    /// Scattering prefactor [1/m].
    pub a: f64,
    /// Scattering power.
    pub b: f64,
    /// Anisotropy.
    pub g: f64,
    /// Refractive index.
    pub n: f64,
    /// Wavelength [nm].
    pub lambda_nm: f64,
}

impl OpticalProperties {
    pub fn new(mu_a: f64, a: f64, b: f64, g: f64, n: f64, lambda_nm: f64) -> Result<Self> {
        let bad = |detail: String| Err(Error::domain("optical properties", detail));
        if !(mu_a >= 0.0 && mu_a.is_finite()) {
            return bad(format!("mu_a must be >= 0, got {mu_a:e}"));
        }
        if !(a > 0.0 && a.is_finite()) {
            return bad(format!("a must be > 0, got {a:e}"));
        }
        if !b.is_finite() {
            return bad(format!("b must be finite, got {b:e}"));
        }
        if !(0.0..1.0).contains(&g) {
            return bad(format!("g must lie in [0, 1), got {g}"));
        }
        if !(n >= 1.0 && n.is_finite()) {
            return bad(format!("n must be >= 1, got {n}"));
        }
        if !(lambda_nm > 0.0 && lambda_nm.is_finite()) {
            return bad(format!("wavelength must be > 0, got {lambda_nm:e}"));
        }
        Ok(Self {
            mu_a,
            a,
            b,
            g,
            n,
            lambda_nm,
        })
    }

    pub fn with_g(self, g: f64) -> Result<Self> {
        Self::new(self.mu_a, self.a, self.b, g, self.n, self.lambda_nm)
    }

    /// mu_s' at the stored wavelength.
    pub fn mu_s_prime(&self) -> f64 {
        self.a * (self.lambda_nm / REFERENCE_WAVELENGTH_NM).powf(-self.b)
    }

    /// mu_s' of the scattering law at another wavelength.
    pub fn reduced_scattering_at(&self, lambda_nm: f64) -> Result<f64> {
        if !(lambda_nm > 0.0) {
            return Err(Error::domain(
                "reduced_scattering",
                format!("wavelength must be > 0, got {lambda_nm:e}"),
            ));
        }
        Ok(self.a * (lambda_nm / REFERENCE_WAVELENGTH_NM).powf(-self.b))
    }

    pub fn mu_s(&self) -> f64 {
        self.mu_s_prime() / (1.0 - self.g)
    }

    pub fn mu_t(&self) -> f64 {
        self.mu_a + self.mu_s()
    }

    /// D = 1 / (3 (mu_a + mu_s')) [m].
    pub fn diffusion(&self) -> f64 {
        1.0 / (3.0 * (self.mu_a + self.mu_s_prime()))
    }

    pub fn mu_eff(&self) -> f64 {
        (3.0 * self.mu_a * (self.mu_a + self.mu_s_prime())).sqrt()
    }

    pub fn absorption_scattering_ratio(&self) -> f64 {
        self.mu_a / self.mu_s_prime()
    }

    /// Light speed in the tissue, c/n.
    pub fn nu(&self) -> f64 {
        LIGHT_SPEED / self.n
    }

    /// D mu_t^2 - mu_a [1/m]; zero in the steady-state (mu_eff) degeneracy.
    pub fn growth_coefficient(&self) -> f64 {
        let mt = self.mu_t();
        self.diffusion() * mt * mt - self.mu_a
    }

    /// Growth rate of the in-pulse fluence, nu (D mu_t^2 - mu_a) [1/s].
    pub fn zeta_in(&self) -> f64 {
        self.nu() * self.growth_coefficient()
    }

    /// `growth_coefficient`, rejected when it vanishes relative to `D mu_t^2`.
    pub fn checked_growth_coefficient(&self) -> Result<f64> {
        let mt = self.mu_t();
        let scale = self.diffusion() * mt * mt;
        let value = self.growth_coefficient();
        if value.abs() <= DEGENERACY_TOL * scale.max(self.mu_a) {
            return Err(Error::degenerate(
                "D mu_t^2 - mu_a",
                format!("{value:e} is zero relative to {scale:e} (steady-state regime)"),
            ));
        }
        Ok(value)
    }
}

pub fn reduced_scattering(props: &OpticalProperties, lambda_nm: f64) -> Result<f64> {
    props.reduced_scattering_at(lambda_nm)
}

pub fn absorption_scattering_ratio(props: &OpticalProperties) -> f64 {
    props.absorption_scattering_ratio()
}

pub fn total_attenuation(props: &OpticalProperties) -> f64 {
    props.mu_t()
}

pub fn diffusion_coefficient(props: &OpticalProperties) -> f64 {
    props.diffusion()
}

pub fn zeta_in(props: &OpticalProperties) -> f64 {
    props.zeta_in()
}
