//! One fully resolved run configuration: tissue pair, laser, geometry and constants.

use serde::Serialize;

use crate::damage::ArrheniusParams;
use crate::error::{Error, Result};
use crate::params::{check_g, BloodConstants, OpticalProperties, Registry, ThermalProperties};
use crate::source::{Geometry, LaserProtocol, TwoTissueSource};

/// Overrides applied on top of registry defaults. `None` keeps the default.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ScenarioRequest {
    pub pair: String,
    pub lambda_nm: Option<f64>,
    pub power_w: Option<f64>,
    pub t_p: Option<f64>,
    pub delta_t: Option<f64>,
    pub t_end: Option<f64>,
    pub g: Option<f64>,
    pub gamma_r: Option<f64>,
}

impl ScenarioRequest {
    pub fn new(pair: &str) -> Self {
        Self {
            pair: pair.to_string(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub pair: String,
    pub inner_name: String,
    pub outer_name: String,
    pub inner: OpticalProperties,
    pub outer: OpticalProperties,
    pub inner_thermal: ThermalProperties,
    pub outer_thermal: ThermalProperties,
    pub blood: BloodConstants,
    pub protocol: LaserProtocol,
    pub geometry: Geometry,
    pub gamma_r: f64,
    pub arrhenius: ArrheniusParams,
}

impl Scenario {
    pub fn resolve(registry: &Registry, request: &ScenarioRequest) -> Result<Self> {
        let pair = registry.pair(&request.pair)?;
        let lambda = request.lambda_nm.unwrap_or(registry.laser.lambda_nm);
        if let Some(g) = request.g {
            check_g(g)?;
        }
        let inner = registry.optics(&pair.inner, lambda, request.g)?;
        let outer = registry.optics(&pair.outer, lambda, request.g)?;
        let t_p = request.t_p.unwrap_or(registry.laser.t_p);
        let delta_t = request
            .delta_t
            .unwrap_or(registry.laser.interval_factor * t_p);
        let power = request.power_w.unwrap_or(registry.laser.power_w);
        let geometry = registry.geometry;
        let protocol = match request.t_end {
            Some(t_end) => LaserProtocol::new(power, lambda, t_p, delta_t, t_end, geometry.r_f),
            None => LaserProtocol::with_pulses(
                power,
                lambda,
                t_p,
                delta_t,
                registry.laser.pulses as usize,
                geometry.r_f,
            ),
        }
        .map_err(|e| Error::Config(e.to_string()))?;
        let gamma_r = request.gamma_r.unwrap_or(registry.gamma_r);
        if !gamma_r.is_finite() {
            return Err(Error::Config(format!("gamma_r must be finite, got {gamma_r}")));
        }
        Ok(Self {
            pair: request.pair.clone(),
            inner_name: pair.inner.clone(),
            outer_name: pair.outer.clone(),
            inner,
            outer,
            inner_thermal: registry.thermal(&pair.inner_thermal)?,
            outer_thermal: registry.thermal(&pair.outer_thermal)?,
            blood: registry.blood,
            protocol,
            geometry,
            gamma_r,
            arrhenius: registry.arrhenius,
        })
    }

    /// Bundled registry, given pair and wavelength, everything else default.
    pub fn bundled(pair: &str, lambda_nm: f64) -> Result<Self> {
        let request = ScenarioRequest {
            lambda_nm: Some(lambda_nm),
            ..ScenarioRequest::new(pair)
        };
        Self::resolve(&Registry::bundled(), &request)
    }

    pub fn with_g(mut self, g: f64) -> Result<Self> {
        check_g(g)?;
        self.inner = self.inner.with_g(g)?;
        self.outer = self.outer.with_g(g)?;
        Ok(self)
    }

    pub fn source(&self) -> TwoTissueSource {
        TwoTissueSource {
            inner: self.inner,
            outer: self.outer,
            protocol: self.protocol,
            geometry: self.geometry,
        }
    }
}
