//! Fluence rate: in-pulse core solution, radial extensions, inter-pulse Fourier-Bessel series,
//! axial continuation and the piecewise field over the two-tissue cylinder.

mod core;
mod radial;
mod series;

pub use self::core::{end_of_pulse_value, phi_in_pulse, s_in, EXPONENT_LIMIT};
pub use radial::{
    beta1, beta2, critical_gamma, radial_general_log, radial_outer, radial_particular, InPulseExtension,
    RadialKind, RadialSolution,
};
pub use series::{
    axial_continuation, fourier_bessel_coefficient, interpulse_series, AxialBranch, AxialContinuation,
    SeriesFamily, SeriesSolution, COEFFICIENT_CUTOFF, DEFAULT_TERMS,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::source::{Phase, Region};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluenceOptions {
    pub terms: usize,
    pub family: SeriesFamily,
    /// Non-default extension: each gap also carries the decayed series of all earlier gaps
    /// instead of restarting from the same end-of-pulse state.
    pub chain_state: bool,
}

impl Default for FluenceOptions {
    fn default() -> Self {
        Self {
            terms: DEFAULT_TERMS,
            family: SeriesFamily::Dirichlet,
            chain_state: false,
        }
    }
}

/// Piecewise fluence field for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluenceModel {
    pub scenario: Scenario,
    pub options: FluenceOptions,
    pub s_in: f64,
    pub series: SeriesSolution,
    pub axial: AxialContinuation,
}

impl FluenceModel {
    /// Fails with [`Error::Overflow`] when `zeta_in t_p` exceeds [`EXPONENT_LIMIT`].
    pub fn new(scenario: &Scenario, options: FluenceOptions) -> Result<Self> {
        let inner = &scenario.inner;
        let s_in = s_in(inner, &scenario.protocol).map_err(|e| e.context("core source scale"))?;
        let series = interpulse_series(
            inner,
            &scenario.geometry,
            &scenario.protocol,
            scenario.gamma_r,
            options.family,
            options.terms,
        )
        .map_err(|e| e.context("inter-pulse series"))?;
        let axial = axial_continuation(
            &series,
            &scenario.geometry,
            inner,
            &scenario.outer,
            &scenario.protocol,
            scenario.gamma_r,
        )
        .map_err(|e| e.context("axial continuation"))?;
        Ok(Self {
            scenario: scenario.clone(),
            options,
            s_in,
            series,
            axial,
        })
    }

    /// Latest time the field is defined: end of the interval following the last pulse.
    pub fn horizon(&self) -> f64 {
        let p = &self.scenario.protocol;
        p.pulses as f64 * p.period()
    }

    /// phi(r, z, t) [W/m^2].
    pub fn phi(&self, r: f64, z: f64, t: f64) -> Result<f64> {
        let g = &self.scenario.geometry;
        if !g.contains(r, z) {
            return Err(Error::domain(
                "phi_field",
                format!("(r, z) = ({r:e}, {z:e}) outside the domain"),
            ));
        }
        if !(0.0..=self.horizon()).contains(&t) {
            return Err(Error::domain(
                "phi_field",
                format!("t = {t:e} outside [0, {:e}]", self.horizon()),
            ));
        }
        let z = z.abs();
        let region = g.region(r, z);
        let p = &self.scenario.protocol;
        let phase = if t >= self.horizon() {
            Phase::Gap {
                index: p.pulses - 1,
                local: t - p.pulse_start(p.pulses - 1),
            }
        } else {
            p.phase(t)
        };
        let (index, own) = match phase {
            Phase::Pulse { index, local } => {
                let v = self
                    .pulse_value(region, z, local)
                    .map_err(|e| e.context(format!("{} region, pulse {index}", region.label())))?;
                (index, v)
            }
            Phase::Gap { index, local } => {
                let v = self
                    .gap_value(region, r, z, local - p.t_p)
                    .map_err(|e| e.context(format!("{} region, gap after pulse {index}", region.label())))?;
                (index + 1, v)
            }
        };
        if !self.options.chain_state {
            return Ok(own);
        }
        let mut total = own;
        let earlier = match phase {
            Phase::Pulse { .. } => index,
            Phase::Gap { .. } => index - 1,
        };
        for k in 0..earlier {
            let tau = t - p.pulse_start(k) - p.t_p;
            total += self
                .gap_value(region, r, z, tau)
                .map_err(|e| e.context(format!("carried state of gap {k}")))?;
        }
        Ok(total)
    }

    fn pulse_value(&self, region: Region, z: f64, local: f64) -> Result<f64> {
        match region {
            Region::Core => phi_in_pulse(&self.scenario.inner, &self.scenario.protocol, z, local),
            _ => Ok(0.0),
        }
    }

    fn gap_value(&self, region: Region, r: f64, z: f64, tau: f64) -> Result<f64> {
        match region {
            Region::Core => self.series.value(r, z, tau),
            Region::AxialOuter if r <= self.scenario.geometry.r_f => self.axial.value(&self.series, r, z, tau),
            _ => Ok(0.0),
        }
    }

    /// phi(z, t_p^-) in the core: the end-of-pulse closed form.
    pub fn left_limit(&self, z: f64) -> Result<f64> {
        phi_in_pulse(&self.scenario.inner, &self.scenario.protocol, z, self.scenario.protocol.t_p)
    }

    /// phi(r, z, t_p^+) in the core: the series partial sum at the start of the gap.
    pub fn right_limit(&self, r: f64, z: f64) -> Result<f64> {
        self.series.value(r, z, 0.0)
    }
}

/// Convenience wrapper building a [`FluenceModel`] with default options.
pub fn phi_field(scenario: &Scenario, r: f64, z: f64, t: f64) -> Result<f64> {
    FluenceModel::new(scenario, FluenceOptions::default())?.phi(r, z, t)
}

/// Result of the outward march for `r_o`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OuterRadius {
    pub r_o: f64,
    pub converged: bool,
    pub steps: usize,
    /// Envelope at `r_o` relative to the global maximum.
    pub ratio: f64,
}

/// Marches outward from `r_i` in steps of `r_i/10` until the in-pulse extension beyond `r_i`
/// (maximised over `z` and `t` in the first pulse) falls below `1e-6` of the peak fluence.
pub fn outer_radius(extension: &InPulseExtension, t_p: f64, max_steps: usize) -> Result<OuterRadius> {
    let growth = extension.zeta_in * t_p;
    self::core::guard_exponent("exp(zeta_in t_p)", growth)?;
    let peak = (extension.s_in * growth.exp_m1()).abs();
    let step = extension.geometry.r_i / 10.0;
    let mut ratio = f64::INFINITY;
    let mut r = extension.geometry.r_i;
    for k in 1..=max_steps {
        r = extension.geometry.r_i + k as f64 * step;
        let (a, b) = extension.factors(r)?;
        // linear in exp(zeta_in t), so the extreme is at t = 0 or t = t_p; z = 0 maximises.
        let envelope = (a + b).abs().max((a + b * growth.exp()).abs());
        ratio = envelope / peak;
        if ratio < 1e-6 {
            return Ok(OuterRadius {
                r_o: r,
                converged: true,
                steps: k,
                ratio,
            });
        }
    }
    Ok(OuterRadius {
        r_o: r,
        converged: false,
        steps: max_steps,
        ratio,
    })
}
