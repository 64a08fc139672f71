//! Named validation suites over the module invariants, with machine-readable results.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bioheat::TemperatureSolution;
use crate::damage::{critical_time, critical_time_bounds, ArrheniusParams};
use crate::error::Result;
use crate::fluence::{interpulse_series, phi_in_pulse, s_in, InPulseExtension, SeriesFamily, SeriesSolution, DEFAULT_TERMS};
use crate::numerics::{integrate, Tolerance};
use crate::oracle::{residual_of, Equation, ResidualReport, Window};
use crate::scenario::Scenario;
use crate::source::source_coefficient;
use crate::specfun::{i01_scaled, j0, jy01, k01_scaled};

/// Seed for the random probes of the Duhamel suite.
pub const PROBE_SEED: u64 = 0x5eed_0f_1a5e;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Specfun,
    PdeResidual,
    Duhamel,
    Damage,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Specfun, Suite::PdeResidual, Suite::Duhamel, Suite::Damage];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::PdeResidual => "pde_residual",
            Suite::Duhamel => "duhamel",
            Suite::Damage => "damage",
        }
    }

    pub fn run(self) -> SuiteReport {
        let checks = match self {
            Suite::Specfun => specfun_checks(),
            Suite::PdeResidual => pde_residual_checks(),
            Suite::Duhamel => duhamel_checks(),
            Suite::Damage => damage_checks(),
        };
        SuiteReport {
            suite: self.name(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

/// One pass/fail result. `value` is compared against `limit` as described by `detail`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(name: &str, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed: value <= limit,
            value,
            limit,
            detail: detail.into(),
        }
    }

    /// Records an error as a failed check.
    pub fn failed(name: &str, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.to_string(),
            passed: false,
            value: f64::NAN,
            limit: f64::NAN,
            detail: err.to_string(),
        }
    }

    fn from_result(name: &str, r: Result<Check>) -> Self {
        r.unwrap_or_else(|e| Check::failed(name, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Worst relative deviation of the two Wronskians over `points` log-spaced arguments in `[lo, hi]`.
pub fn wronskian_sweep(lo: f64, hi: f64, points: usize) -> Result<(f64, f64)> {
    let (mut jy, mut ik) = (0.0f64, 0.0f64);
    for k in 0..points {
        let x = lo * (hi / lo).powf(k as f64 / (points - 1) as f64);
        let [j0, j1, y0, y1] = jy01(x)?;
        let w = 2.0 / (std::f64::consts::PI * x);
        jy = jy.max(((j1 * y0 - y1 * j0) - w).abs() / w);
        // the exponential scalings cancel in the products
        let [i0, i1] = i01_scaled(x)?;
        let [k0, k1] = k01_scaled(x)?;
        ik = ik.max(((i1 * k0 + k1 * i0) * x - 1.0).abs());
    }
    Ok((jy, ik))
}

fn specfun_checks() -> Vec<Check> {
    let mut out = Vec::new();
    match wronskian_sweep(0.05, 500.0, 200) {
        Ok((jy, ik)) => {
            out.push(Check::at_most("wronskian_jy", jy, 1e-10, "max rel. deviation of J1 Y0 - J0 Y1 from 2/(pi x)"));
            out.push(Check::at_most("wronskian_ik", ik, 1e-10, "max rel. deviation of I1 K0 + I0 K1 from 1/x"));
        }
        Err(e) => out.push(Check::failed("wronskian", e)),
    }
    let first = crate::specfun::j0_positive_roots(1).map(|r| r[0]);
    out.push(Check::from_result(
        "j0_first_root",
        first.map(|x| Check::at_most("j0_first_root", (x - 2.404_825_557_695_773).abs(), 1e-13, "abs error")),
    ));
    out.push(Check::at_most("j0_at_origin", (j0(0.0) - 1.0).abs(), 0.0, "J0(0) = 1 exactly"));
    out
}

/// Residual convergence of the in-pulse core field on a window away from the tip.
pub fn in_pulse_residual(scenario: &Scenario, levels: &[usize]) -> Result<ResidualReport> {
    let o = scenario.inner;
    let p = scenario.protocol;
    let coef = source_coefficient(&o) * p.peak_irradiance();
    let mu_t = o.mu_t();
    let r_f = scenario.geometry.r_f;
    let window = Window {
        r0: 0.1 * r_f,
        r1: 0.9 * r_f,
        z0: 1e-4,
        z1: 1.1e-3,
    };
    let eq = Equation::Light {
        nu: o.nu(),
        d: o.diffusion(),
        mu_a: o.mu_a,
    };
    residual_of(
        |_, z, t| phi_in_pulse(&o, &p, z, t),
        |_, z, _| coef * (-mu_t * z).exp(),
        eq,
        window,
        0.5 * p.t_p,
        levels,
    )
}

/// Residual convergence of the radial extensions: the tumor annulus (inner optics) and the
/// healthy region (outer optics).
pub fn extension_residuals(scenario: &Scenario, levels: &[usize]) -> Result<[ResidualReport; 2]> {
    let (g, i, o) = (scenario.geometry, scenario.inner, scenario.outer);
    let ext = InPulseExtension::new(&i, &o, &scenario.protocol, &g, scenario.gamma_r)?;
    let t = 0.5 * scenario.protocol.t_p;
    let run = |optics: crate::params::OpticalProperties, window: Window| {
        let eq = Equation::Light {
            nu: optics.nu(),
            d: optics.diffusion(),
            mu_a: optics.mu_a,
        };
        residual_of(|r, z, t| ext.value(r, z, t), |_, _, _| 0.0, eq, window, t, levels)
    };
    let annulus = Window {
        r0: 2.0 * g.r_f,
        r1: 2.0 * g.r_f + 1e-3,
        z0: 1e-4,
        z1: 1.1e-3,
    };
    let healthy = Window {
        r0: 1.1 * g.r_i,
        r1: 1.1 * g.r_i + 1e-3,
        z0: 1e-4,
        z1: 1.1e-3,
    };
    Ok([run(i, annulus)?, run(o, healthy)?])
}

/// Radial L2 (`r dr`) error of the truncated series against `u0` on the disk.
pub fn series_l2_error(series: &SeriesSolution, terms: usize) -> Result<f64> {
    let a = series.radius;
    let breaks: Vec<f64> = (1..200).map(|k| a * k as f64 / 200.0).collect();
    let mut failure = None;
    let est = integrate(
        |r| match series.radial_sum_truncated(r, 0.0, terms) {
            Ok(v) => r * (v - series.u0) * (v - series.u0),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        a,
        &breaks,
        Tolerance::new(1e-40, 1e-10),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est.value.sqrt())
}

/// Orthogonality quotient `u0 int r J0(b r) dr / int r J0(b r)^2 dr` by quadrature.
pub fn coefficient_by_quadrature(series: &SeriesSolution, n: usize) -> Result<f64> {
    let (a, b) = (series.radius, series.b[n]);
    let tol = Tolerance::new(1e-30, 1e-13);
    let num = integrate(|r| r * j0(b * r), 0.0, a, &[], tol)?.value;
    let den = integrate(|r| r * j0(b * r).powi(2), 0.0, a, &[], tol)?.value;
    Ok(series.u0 * num / den)
}

fn order_check(name: &str, rep: Result<ResidualReport>) -> Check {
    Check::from_result(
        name,
        rep.map(|r| {
            Check::at_most(
                name,
                (r.order - 2.0).abs(),
                0.3,
                format!("|order - 2|, fitted order {:.4}", r.order),
            )
        }),
    )
}

fn pde_residual_checks() -> Vec<Check> {
    let levels = [32, 64, 128];
    let mut out = Vec::new();
    match Scenario::bundled("breast", 810.0) {
        Ok(sc) => out.push(order_check("in_pulse_order", in_pulse_residual(&sc, &levels))),
        Err(e) => out.push(Check::failed("in_pulse_order", e)),
    }
    match Scenario::bundled("prostate", 980.0).and_then(|sc| extension_residuals(&sc, &levels)) {
        Ok([a, b]) => {
            out.push(order_check("annulus_extension_order", Ok(a)));
            out.push(order_check("healthy_extension_order", Ok(b)));
        }
        Err(e) => out.push(Check::failed("extension_order", e)),
    }
    let series = Scenario::bundled("breast", 810.0).and_then(|sc| {
        interpulse_series(&sc.inner, &sc.geometry, &sc.protocol, sc.gamma_r, SeriesFamily::Dirichlet, DEFAULT_TERMS)
    });
    match series {
        Ok(s) => {
            out.push(Check::from_result(
                "series_l2_within_tail_bound",
                series_l2_error(&s, DEFAULT_TERMS).map(|e| {
                    Check::at_most("series_l2_within_tail_bound", e, s.tail_bound, "L2 error vs recorded tail bound")
                }),
            ));
            out.push(Check::from_result(
                "series_c1_quadrature",
                coefficient_by_quadrature(&s, 0).map(|q| {
                    Check::at_most("series_c1_quadrature", ((s.c[0] - q) / q).abs(), 1e-8, "relative difference")
                }),
            ));
        }
        Err(e) => out.push(Check::failed("series", e)),
    }
    out
}

/// Worst relative difference between the closed-form and quadrature temperature excess at
/// `count` seeded random `(z, t)` probes in `[0, ell] x (0, t_p]`.
pub fn duhamel_probes(scenario: &Scenario, count: usize, seed: u64) -> Result<f64> {
    let (upper, _) = critical_time_bounds(&scenario.arrhenius, scenario.blood.t_b, scenario.blood.t_b)?;
    let sol = TemperatureSolution::new(scenario, upper)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let z = rng.random_range(0.0..scenario.geometry.ell);
        let t = sol.t_p * rng.random_range(1e-6..=1.0);
        let a = sol.excess_in_pulse(z, t)?;
        let b = sol.excess_by_quadrature(z, t, 1e-12)?;
        worst = worst.max(((a - b) / b).abs());
    }
    Ok(worst)
}

fn duhamel_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (pair, lambda) in [("breast", 810.0), ("prostate", 1064.0)] {
        let name = format!("duhamel_{pair}_{lambda}");
        let r = Scenario::bundled(pair, lambda)
            .and_then(|sc| duhamel_probes(&sc, 50, PROBE_SEED))
            .map(|w| Check::at_most(&name, w, 1e-8, "max rel. difference over 50 probes"));
        out.push(Check::from_result(&name, r));
    }
    let positive = Scenario::bundled("breast", 810.0).and_then(|sc| s_in(&sc.inner, &sc.protocol));
    out.push(Check::from_result(
        "s_in_positive",
        positive.map(|s| Check {
            name: "s_in_positive".into(),
            passed: s > 0.0,
            value: s,
            limit: 0.0,
            detail: "S_in > 0".into(),
        }),
    ));
    out
}

/// Upper bound at T_b and lower bound at 50 C.
pub fn damage_bounds(params: &ArrheniusParams, t_b: f64) -> Result<(f64, f64)> {
    let (_, upper) = critical_time_bounds(params, t_b, t_b)?;
    let lower = params.constant_temperature_time(323.15)?;
    Ok((upper, lower))
}

fn damage_checks() -> Vec<Check> {
    let p = ArrheniusParams::default();
    let mut out = Vec::new();
    match damage_bounds(&p, 311.15) {
        Ok((upper, lower)) => {
            out.push(Check::at_most(
                "upper_bound_t_b",
                ((upper - 9.9e3) / 9.9e3).abs(),
                0.10,
                format!("bound {upper:.6e} s vs reference 9.9e3 s"),
            ));
            out.push(Check::at_most(
                "lower_bound_50c",
                ((lower - 2.8871) / 2.8871).abs(),
                0.15,
                format!("bound {lower:.6e} s vs reference 2.8871 s"),
            ));
        }
        Err(e) => out.push(Check::failed("bounds", e)),
    }
    let r = critical_time(&p, |_| 323.15, 100.0, &[]).and_then(|t| {
        let exact = p.constant_temperature_time(323.15)?;
        Ok(Check::at_most(
            "constant_trajectory_t_crit",
            ((t - exact) / exact).abs(),
            1e-9,
            "root of Omega = 1 vs closed form",
        ))
    });
    out.push(Check::from_result("constant_trajectory_t_crit", r));
    out
}

/// Runs `suites` in order.
pub fn run_suites(suites: &[Suite]) -> Vec<SuiteReport> {
    suites.iter().map(|s| s.run()).collect()
}
