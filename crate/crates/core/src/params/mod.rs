//! Tissue constants, unit handling and derived optical/thermal coefficients.

mod optics;
mod registry;
mod thermal;

pub use optics::{
    absorption_scattering_ratio, diffusion_coefficient, reduced_scattering, total_attenuation, zeta_in,
    OpticalProperties, DEGENERACY_TOL, LIGHT_SPEED, REFERENCE_WAVELENGTH_NM,
};
pub use registry::{check_g, LaserDefaults, Registry, TissueOptics, TissuePair};
pub use thermal::{
    conductivity, specific_heat, zeta0, zeta1, zeta1_integral, zeta_thermal, BloodConstants,
    ThermalProperties, RHO_WATER,
};
