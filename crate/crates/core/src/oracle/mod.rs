//! Explicit finite-volume solver for the axisymmetric radiative-diffusion and bioheat
//! equations, and discrete residuals of analytic fields.
//!
//! The solver shares no code with the closed forms: it only sees cell-wise coefficients and
//! a source callable.

mod compare;
mod residual;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{BloodConstants, OpticalProperties, ThermalProperties};
use crate::source::{Geometry, Region};

pub use compare::{
    compare_bioheat, compare_radiative, core_faces, core_grid, core_probes, Comparison, Probe, CORE_GRIDS,
    PROBE_TOLERANCE,
};
pub use residual::{fit_order, residual_of, Equation, LevelResidual, ResidualReport, Window};

/// Fraction of the stability bound used when the time step is chosen automatically.
pub const STABILITY_FRACTION: f64 = 0.4;
/// Lower limit on the number of steps, so slow problems still resolve the time dependence.
pub const MIN_STEPS: usize = 2000;

/// Cell-centred grid on `[0, r_max] x [z_min, z_max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisymmetricGrid {
    pub nr: usize,
    pub nz: usize,
    pub dr: f64,
    pub dz: f64,
    pub z_min: f64,
    /// Tissue tag per cell, row-major in z.
    pub regions: Vec<Region>,
    /// Time step; `None` picks `STABILITY_FRACTION` of the bound.
    pub dt: Option<f64>,
}

impl AxisymmetricGrid {
    pub fn new(geometry: &Geometry, r_max: f64, z_range: (f64, f64), nr: usize, nz: usize) -> Result<Self> {
        let (z_min, z_max) = z_range;
        if nr == 0 || nz == 0 || !(r_max > 0.0) || !(z_max > z_min) {
            return Err(Error::domain("grid", format!("bad extents or counts: r_max {r_max:e}, z {z_min:e}..{z_max:e}")));
        }
        let dr = r_max / nr as f64;
        let dz = (z_max - z_min) / nz as f64;
        let on_face = |x: f64, origin: f64, h: f64| {
            let k = (x - origin) / h;
            (k - k.round()).abs() <= 1e-9 * k.abs().max(1.0)
        };
        for (name, b) in [("r_f", geometry.r_f), ("r_i", geometry.r_i)] {
            if b < r_max && !on_face(b, 0.0, dr) {
                return Err(Error::domain("grid", format!("{name} = {b:e} does not fall on a cell face")));
            }
        }
        for b in [geometry.ell, -geometry.ell] {
            if b > z_min && b < z_max && !on_face(b, z_min, dz) {
                return Err(Error::domain("grid", format!("z = {b:e} does not fall on a cell face")));
            }
        }
        let mut regions = Vec::with_capacity(nr * nz);
        for j in 0..nz {
            let z = z_min + (j as f64 + 0.5) * dz;
            for i in 0..nr {
                regions.push(geometry.region((i as f64 + 0.5) * dr, z.abs()));
            }
        }
        Ok(Self {
            nr,
            nz,
            dr,
            dz,
            z_min,
            regions,
            dt: None,
        })
    }

    pub fn with_time_step(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn r_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr
    }

    pub fn z_center(&self, j: usize) -> f64 {
        self.z_min + (j as f64 + 0.5) * self.dz
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nr + i
    }

    pub fn cells(&self) -> usize {
        self.nr * self.nz
    }
}

/// Boundary treatment of one outer face: `K dphi/dn + gamma phi = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Face {
    Insulated,
    Robin { gamma: f64 },
}

impl Face {
    fn gamma(self) -> f64 {
        match self {
            Face::Insulated => 0.0,
            Face::Robin { gamma } => gamma,
        }
    }
}

/// Faces other than the axis, which is always a symmetry line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Faces {
    pub outer_r: Face,
    pub bottom: Face,
    pub top: Face,
}

impl Faces {
    pub const INSULATED: Faces = Faces {
        outer_r: Face::Insulated,
        bottom: Face::Insulated,
        top: Face::Insulated,
    };
}

/// Field at the end of a run; `values` are offsets from `baseline`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldProfile {
    pub grid: AxisymmetricGrid,
    pub t: f64,
    pub dt: f64,
    pub steps: usize,
    pub baseline: f64,
    pub values: Vec<f64>,
}

impl FieldProfile {
    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Bilinear interpolation between cell centres, clamped to the outermost centres.
    pub fn sample(&self, r: f64, z: f64) -> f64 {
        let g = &self.grid;
        let x = (r / g.dr - 0.5).clamp(0.0, (g.nr - 1) as f64);
        let y = ((z - g.z_min) / g.dz - 0.5).clamp(0.0, (g.nz - 1) as f64);
        let (i0, j0) = (x.floor() as usize, y.floor() as usize);
        let (i1, j1) = ((i0 + 1).min(g.nr - 1), (j0 + 1).min(g.nz - 1));
        let (fx, fy) = (x - i0 as f64, y - j0 as f64);
        let lo = self.cell(i0, j0) * (1.0 - fx) + self.cell(i1, j0) * fx;
        let hi = self.cell(i0, j1) * (1.0 - fx) + self.cell(i1, j1) * fx;
        lo * (1.0 - fy) + hi * fy
    }

    /// Full value `baseline + offset` at a point.
    pub fn absolute(&self, r: f64, z: f64) -> f64 {
        self.baseline + self.sample(r, z)
    }
}

/// Linear operator `cap du/dt = div(K grad u) - sink(t) u + source` on the grid.
struct Operator {
    nr: usize,
    capacity: Vec<f64>,
    east: Vec<f64>,
    west: Vec<f64>,
    north: Vec<f64>,
    south: Vec<f64>,
    boundary: Vec<f64>,
    centres: Vec<(f64, f64)>,
}

fn harmonic(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

impl Operator {
    fn new(grid: &AxisymmetricGrid, capacity: Vec<f64>, conductivity: &[f64], faces: &Faces) -> Self {
        let (nr, nz, dr, dz) = (grid.nr, grid.nz, grid.dr, grid.dz);
        let n = grid.cells();
        let mut op = Operator {
            nr,
            capacity,
            east: vec![0.0; n],
            west: vec![0.0; n],
            north: vec![0.0; n],
            south: vec![0.0; n],
            boundary: vec![0.0; n],
            centres: Vec::with_capacity(n),
        };
        let robin = |gamma: f64, k: f64, h: f64| if gamma == 0.0 { 0.0 } else { gamma / (1.0 + gamma * h / (2.0 * k)) };
        for j in 0..nz {
            for i in 0..nr {
                let c = grid.index(i, j);
                let k = conductivity[c];
                let r = grid.r_center(i);
                op.centres.push((r, grid.z_center(j)));
                let (r_e, r_w) = (r + 0.5 * dr, r - 0.5 * dr);
                if i + 1 < nr {
                    op.east[c] = harmonic(k, conductivity[c + 1]) * r_e / (r * dr * dr);
                } else {
                    op.boundary[c] += robin(faces.outer_r.gamma(), k, dr) * r_e / (r * dr);
                }
                if i > 0 {
                    op.west[c] = harmonic(k, conductivity[c - 1]) * r_w / (r * dr * dr);
                }
                if j + 1 < nz {
                    op.north[c] = harmonic(k, conductivity[c + nr]) / (dz * dz);
                } else {
                    op.boundary[c] += robin(faces.top.gamma(), k, dz) / dz;
                }
                if j > 0 {
                    op.south[c] = harmonic(k, conductivity[c - nr]) / (dz * dz);
                } else {
                    op.boundary[c] += robin(faces.bottom.gamma(), k, dz) / dz;
                }
            }
        }
        op
    }

    /// Largest diagonal magnitude over capacity, including the sink bound.
    fn stiffness(&self, sink_max: &[f64]) -> f64 {
        (0..self.capacity.len())
            .map(|c| {
                (self.east[c] + self.west[c] + self.north[c] + self.south[c] + self.boundary[c].abs() + sink_max[c])
                    / self.capacity[c]
            })
            .fold(0.0, f64::max)
    }

    fn rate<S, K>(&self, u: &[f64], t: f64, sink: &K, source: &S, out: &mut [f64])
    where
        S: Fn(f64, f64, f64) -> f64 + Sync,
        K: Fn(usize, f64) -> f64 + Sync,
    {
        let nr = self.nr;
        let n = u.len();
        out.par_chunks_mut(nr).enumerate().for_each(|(j, row)| {
            for (i, slot) in row.iter_mut().enumerate() {
                let c = j * nr + i;
                let uc = u[c];
                let mut div = -self.boundary[c] * uc;
                if i + 1 < nr {
                    div += self.east[c] * (u[c + 1] - uc);
                }
                if i > 0 {
                    div += self.west[c] * (u[c - 1] - uc);
                }
                if c + nr < n {
                    div += self.north[c] * (u[c + nr] - uc);
                }
                if c >= nr {
                    div += self.south[c] * (u[c - nr] - uc);
                }
                let (r, z) = self.centres[c];
                *slot = (div - sink(c, t) * uc + source(r, z, t)) / self.capacity[c];
            }
        });
    }
}

#[allow(clippy::too_many_arguments)]
fn march<S, K>(
    grid: &AxisymmetricGrid,
    op: &Operator,
    sink: K,
    sink_max: &[f64],
    source: S,
    initial: Vec<f64>,
    baseline: f64,
    horizon: f64,
) -> Result<FieldProfile>
where
    S: Fn(f64, f64, f64) -> f64 + Sync,
    K: Fn(usize, f64) -> f64 + Sync,
{
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::domain("finite differences", format!("horizon must be >= 0, got {horizon:e}")));
    }
    let stiffness = op.stiffness(sink_max);
    let bound = if stiffness > 0.0 { 1.0 / stiffness } else { f64::INFINITY };
    let requested = match grid.dt {
        Some(dt) => {
            if !(dt > 0.0) || dt > bound {
                return Err(Error::Unstable(format!("time step {dt:e} exceeds the stability bound {bound:e}")));
            }
            dt
        }
        None => (STABILITY_FRACTION * bound).min(horizon / MIN_STEPS as f64),
    };
    let steps = if horizon == 0.0 { 0 } else { (horizon / requested).ceil() as usize };
    let dt = if steps == 0 { requested } else { horizon / steps as f64 };

    let n = grid.cells();
    let mut u = initial;
    let (mut k1, mut k2, mut trial) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for step in 0..steps {
        let t = step as f64 * dt;
        op.rate(&u, t, &sink, &source, &mut k1);
        trial.par_iter_mut().zip(&u).zip(&k1).for_each(|((w, a), b)| *w = a + dt * b);
        op.rate(&trial, t + dt, &sink, &source, &mut k2);
        u.par_iter_mut().zip(&k1).zip(&k2).for_each(|((a, b), c)| *a += 0.5 * dt * (b + c));
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Unstable(format!("non-finite value after step {}", step + 1)));
        }
    }
    Ok(FieldProfile {
        grid: AxisymmetricGrid {
            dt: Some(dt),
            ..grid.clone()
        },
        t: horizon,
        dt,
        steps,
        baseline,
        values: u,
    })
}

/// Explicit run of `(1/nu) phi_t = div(D grad phi) - mu_a phi + S` from zero data.
///
/// Inner-region cells take `inner`, the rest `outer`. `source(r, z, t)` is sampled at cell centres.
pub fn fd_radiative<S>(
    grid: &AxisymmetricGrid,
    inner: &OpticalProperties,
    outer: &OpticalProperties,
    faces: &Faces,
    source: S,
    horizon: f64,
) -> Result<FieldProfile>
where
    S: Fn(f64, f64, f64) -> f64 + Sync,
{
    fd_radiative_from(grid, inner, outer, faces, source, vec![0.0; grid.cells()], horizon)
}

/// As [`fd_radiative`] with explicit initial data.
pub fn fd_radiative_from<S>(
    grid: &AxisymmetricGrid,
    inner: &OpticalProperties,
    outer: &OpticalProperties,
    faces: &Faces,
    source: S,
    initial: Vec<f64>,
    horizon: f64,
) -> Result<FieldProfile>
where
    S: Fn(f64, f64, f64) -> f64 + Sync,
{
    let pick = |c: usize| if grid.regions[c].is_inner() { inner } else { outer };
    let n = grid.cells();
    if initial.len() != n {
        return Err(Error::domain("fd_radiative", format!("initial data has {} cells, grid {n}", initial.len())));
    }
    let capacity: Vec<f64> = (0..n).map(|c| 1.0 / pick(c).nu()).collect();
    let diffusion: Vec<f64> = (0..n).map(|c| pick(c).diffusion()).collect();
    let mu_a: Vec<f64> = (0..n).map(|c| pick(c).mu_a).collect();
    let op = Operator::new(grid, capacity, &diffusion, faces);
    march(grid, &op, |c, _| mu_a[c], &mu_a, source, initial, 0.0, horizon)
}

/// Explicit run of `rho c_p T_t = div(k grad T) - c_b rho_b w_b(t) (T - T_b) + q` from `T = T_b`.
///
/// `perfusion(region, t)` returns `c_b rho_b w_b(t)` [W/m^3/K] and must be bounded by its value
/// at `t = 0`. Values are stored as `T - T_b`.
#[allow(clippy::too_many_arguments)]
pub fn fd_bioheat<Q, P>(
    grid: &AxisymmetricGrid,
    inner: &ThermalProperties,
    outer: &ThermalProperties,
    blood: &BloodConstants,
    faces: &Faces,
    q: Q,
    perfusion: P,
    horizon: f64,
) -> Result<FieldProfile>
where
    Q: Fn(f64, f64, f64) -> f64 + Sync,
    P: Fn(Region, f64) -> f64 + Sync,
{
    let pick = |c: usize| if grid.regions[c].is_inner() { inner } else { outer };
    let n = grid.cells();
    let capacity: Vec<f64> = (0..n).map(|c| pick(c).heat_capacity()).collect();
    let k: Vec<f64> = (0..n).map(|c| pick(c).k).collect();
    let sink_max: Vec<f64> = (0..n).map(|c| perfusion(grid.regions[c], 0.0).abs()).collect();
    let op = Operator::new(grid, capacity, &k, faces);
    let regions = &grid.regions;
    march(
        grid,
        &op,
        |c, t| perfusion(regions[c], t),
        &sink_max,
        q,
        vec![0.0; n],
        blood.t_b,
        horizon,
    )
}
