//! Finite-difference runs on the tumor core set up to match the closed-form fields.
//!
//! On `[0, r_f] x [0, ell]` the in-pulse fields are `f(t) exp(-mu_t z)`; the faces below
//! reproduce exactly that profile, so any difference is discretization error.

use serde::Serialize;

use super::{fd_bioheat, fd_radiative, AxisymmetricGrid, Face, Faces, FieldProfile};
use crate::bioheat::TemperatureSolution;
use crate::error::Result;
use crate::fluence::phi_in_pulse;
use crate::scenario::Scenario;
use crate::source::source_coefficient;

/// Core grids `(nr, nz)`, coarse to fine.
pub const CORE_GRIDS: [(usize, usize); 3] = [(4, 125), (4, 250), (4, 500)];

/// Relative tolerance for the probe comparison.
pub const PROBE_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Probe {
    pub r: f64,
    pub z: f64,
    pub t: f64,
    pub fd: f64,
    pub analytic: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub field: &'static str,
    pub nr: usize,
    pub nz: usize,
    pub t: f64,
    pub dt: f64,
    pub steps: usize,
    pub probes: Vec<Probe>,
    pub max_rel_error: f64,
}

impl Comparison {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_rel_error <= tolerance
    }
}

/// Ten interior probes: two radii times five depths within the first 0.4 mm.
pub fn core_probes(scenario: &Scenario) -> Vec<(f64, f64)> {
    let r_f = scenario.geometry.r_f;
    let mut out = Vec::with_capacity(10);
    for r in [0.3 * r_f, 0.7 * r_f] {
        for z in [5e-5, 1e-4, 2e-4, 3e-4, 4e-4] {
            out.push((r, z));
        }
    }
    out
}

pub fn core_grid(scenario: &Scenario, nr: usize, nz: usize) -> Result<AxisymmetricGrid> {
    let g = &scenario.geometry;
    AxisymmetricGrid::new(g, g.r_f, (0.0, g.ell), nr, nz)
}

/// Robin faces matching `exp(-mu_t z)` for flux coefficient `k`.
pub fn core_faces(k: f64, mu_t: f64) -> Faces {
    Faces {
        outer_r: Face::Insulated,
        bottom: Face::Robin { gamma: -k * mu_t },
        top: Face::Robin { gamma: k * mu_t },
    }
}

fn compare<A>(field: &'static str, profile: &FieldProfile, probes: &[(f64, f64)], analytic: A) -> Result<Comparison>
where
    A: Fn(f64) -> Result<f64>,
{
    let mut out = Vec::with_capacity(probes.len());
    let mut worst: f64 = 0.0;
    for &(r, z) in probes {
        let want = analytic(z)?;
        let got = profile.sample(r, z);
        let rel_error = ((got - want) / want).abs();
        worst = worst.max(rel_error);
        out.push(Probe {
            r,
            z,
            t: profile.t,
            fd: got,
            analytic: want,
            rel_error,
        });
    }
    Ok(Comparison {
        field,
        nr: profile.grid.nr,
        nz: profile.grid.nz,
        t: profile.t,
        dt: profile.dt,
        steps: profile.steps,
        probes: out,
        max_rel_error: worst,
    })
}

/// FD fluence rate at `t` (within the first pulse) against the closed form.
pub fn compare_radiative(scenario: &Scenario, nr: usize, nz: usize, t: f64) -> Result<(FieldProfile, Comparison)> {
    let o = scenario.inner;
    let p = scenario.protocol;
    let coef = source_coefficient(&o) * p.peak_irradiance();
    let mu_t = o.mu_t();
    let grid = core_grid(scenario, nr, nz)?;
    let faces = core_faces(o.diffusion(), mu_t);
    let profile = fd_radiative(&grid, &o, &scenario.outer, &faces, |_, z, _| coef * (-mu_t * z).exp(), t)?;
    let cmp = compare("fluence", &profile, &core_probes(scenario), |z| phi_in_pulse(&o, &p, z, t))?;
    Ok((profile, cmp))
}

/// FD temperature excess at `t` (within the first pulse) against the closed form.
pub fn compare_bioheat(
    scenario: &Scenario,
    nr: usize,
    nz: usize,
    t: f64,
    t_crit: f64,
) -> Result<(FieldProfile, Comparison)> {
    let o = scenario.inner;
    let p = scenario.protocol;
    let sol = TemperatureSolution::new(scenario, t_crit)?;
    let th = scenario.inner_thermal;
    let grid = core_grid(scenario, nr, nz)?;
    let faces = core_faces(th.k, o.mu_t());
    let mu_a = o.mu_a;
    let perfusion = sol.perfusion;
    let profile = fd_bioheat(
        &grid,
        &th,
        &scenario.outer_thermal,
        &scenario.blood,
        &faces,
        |_, z, s| mu_a * phi_in_pulse(&o, &p, z, s.min(p.t_p)).unwrap_or(f64::NAN),
        |_, _| perfusion,
        t,
    )?;
    let cmp = compare("temperature_excess", &profile, &core_probes(scenario), |z| sol.excess_in_pulse(z, t))?;
    Ok((profile, cmp))
}
