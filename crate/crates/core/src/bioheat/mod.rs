//! Core temperature from the Duhamel representation of the bioheat equation, with perfusion
//! decaying linearly to zero at `t_crit`.

use std::cell::RefCell;

use serde::Serialize;

use crate::damage::critical_time;
use crate::error::{Error, Result};
use crate::fluence::{s_in, FluenceModel, EXPONENT_LIMIT};
use crate::numerics::{integrate, integrate_fallible, Tolerance};
use crate::params::{zeta0, zeta1_integral, BloodConstants, ThermalProperties, DEGENERACY_TOL};
use crate::scenario::Scenario;
use crate::source::Region;

/// Absolute tolerance of the post-pulse quadrature [K].
pub const DEFAULT_TOLERANCE_K: f64 = 1e-6;
/// Fixed-point controls for `t_crit`.
pub const T_CRIT_REL_TOL: f64 = 0.01;
pub const T_CRIT_MAX_ITERATIONS: usize = 20;

/// omega_b(t) = omega0 (1 - t/t_crit) on [0, t_crit], zero afterwards [kg/m^3/s].
pub fn perfusion_rate(thermal: &ThermalProperties, t: f64, t_crit: f64) -> Result<f64> {
    if !(t >= 0.0) || !(t_crit > 0.0) {
        return Err(Error::domain(
            "perfusion_rate",
            format!("need t >= 0 and t_crit > 0, got {t:e}, {t_crit:e}"),
        ));
    }
    Ok(thermal.omega0 * (1.0 - t / t_crit).max(0.0))
}

/// F(t) = int_0^t (e^{a s} - 1) e^{b (t - s)} ds.
///
/// Near the origin the Taylor form sum_n t^{n+1}/(n+1)! sum_{j=1..n} a^j b^{n-j} avoids the
/// cancellation of the closed form.
fn kernel(a: f64, b: f64, t: f64, limits: bool) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    if a.abs().max(b.abs()) * t < 0.1 {
        let (mut sum, mut h, mut bp, mut tp) = (0.0, 0.0, 1.0, t);
        for n in 1..40 {
            // h_n = b h_{n-1} + a^n, with bp tracking a^n
            bp *= a;
            h = b * h + bp;
            tp *= t / (n + 1) as f64;
            let term = tp * h;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    let scale = a.abs().max(b.abs());
    if limits && (a - b).abs() <= DEGENERACY_TOL * scale {
        return t * (b * t).exp() - (b * t).exp_m1() / b;
    }
    if limits && b.abs() <= DEGENERACY_TOL * scale {
        return (a * t).exp_m1() / a - t;
    }
    ((a * t).exp_m1() - (b * t).exp_m1()) / (a - b) - (b * t).exp_m1() / b
}

/// Closed-form branch (t < t_p) and the data the post-pulse quadrature needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperatureSolution {
    /// Baseline temperature [K].
    pub t_b: f64,
    pub mu_a: f64,
    pub s_in: f64,
    pub mu_t: f64,
    pub zeta_in: f64,
    pub zeta0: f64,
    /// rho c_p [J/m^3/K].
    pub heat_capacity: f64,
    /// k mu_t^2 [W/m^3/K].
    pub k_mu_t2: f64,
    /// c_b rho_b w [W/m^3/K].
    pub perfusion: f64,
    pub t_p: f64,
    pub t_crit: f64,
    /// Use the limit forms when a denominator degenerates (not part of the published solution).
    pub limit_forms: bool,
    pub thermal: ThermalProperties,
    pub blood: BloodConstants,
}

impl TemperatureSolution {
    pub fn new(scenario: &Scenario, t_crit: f64) -> Result<Self> {
        Self::build(scenario, t_crit, false)
    }

    pub fn with_limit_forms(scenario: &Scenario, t_crit: f64) -> Result<Self> {
        Self::build(scenario, t_crit, true)
    }

    fn build(scenario: &Scenario, t_crit: f64, limit_forms: bool) -> Result<Self> {
        if !(t_crit > 0.0) {
            return Err(Error::domain("temperature", format!("t_crit must be > 0, got {t_crit:e}")));
        }
        let optics = &scenario.inner;
        let thermal = scenario.inner_thermal;
        let blood = scenario.blood;
        let mu_t = optics.mu_t();
        let zeta_in = optics.zeta_in();
        let z0 = zeta0(&thermal, &blood, mu_t);
        let k_mu_t2 = thermal.k * mu_t * mu_t;
        let perfusion = blood.perfusion_coefficient(&thermal);
        if !limit_forms {
            if (zeta_in - z0).abs() <= DEGENERACY_TOL * zeta_in.abs().max(z0.abs()) {
                return Err(Error::degenerate(
                    "temperature",
                    format!("zeta_in = {zeta_in:e} coincides with zeta0 = {z0:e}"),
                ));
            }
            if (k_mu_t2 - perfusion).abs() <= DEGENERACY_TOL * k_mu_t2.max(perfusion) {
                return Err(Error::degenerate(
                    "temperature",
                    format!("k mu_t^2 = {k_mu_t2:e} equals c_b rho_b w = {perfusion:e}"),
                ));
            }
        }
        Ok(Self {
            t_b: blood.t_b,
            mu_a: optics.mu_a,
            s_in: s_in(optics, &scenario.protocol)?,
            mu_t,
            zeta_in,
            zeta0: z0,
            heat_capacity: thermal.heat_capacity(),
            k_mu_t2,
            perfusion,
            t_p: scenario.protocol.t_p,
            t_crit,
            limit_forms,
            thermal,
            blood,
        })
    }

    fn check_in_pulse(&self, t: f64) -> Result<()> {
        if !(0.0..=self.t_p).contains(&t) {
            return Err(Error::domain(
                "temperature_in_pulse",
                format!("t = {t:e} outside [0, t_p = {:e}]", self.t_p),
            ));
        }
        Ok(())
    }

    /// T - T_b for 0 <= t <= t_p [K].
    pub fn excess_in_pulse(&self, z: f64, t: f64) -> Result<f64> {
        self.check_in_pulse(t)?;
        for (name, e) in [("exp(zeta_in t)", self.zeta_in * t), ("exp(zeta0 t)", self.zeta0 * t)] {
            if e > EXPONENT_LIMIT {
                return Err(Error::Overflow {
                    what: name,
                    exponent: e,
                    limit: EXPONENT_LIMIT,
                });
            }
        }
        let f = kernel(self.zeta_in, self.zeta0, t, self.limit_forms);
        Ok(self.mu_a * self.s_in * (-self.mu_t * z.abs()).exp() / self.heat_capacity * f)
    }

    pub fn in_pulse(&self, z: f64, t: f64) -> Result<f64> {
        Ok(self.t_b + self.excess_in_pulse(z, t)?)
    }

    /// T - T_b in the pulse from adaptive quadrature of the Duhamel integral instead of the closed form.
    pub fn excess_by_quadrature(&self, z: f64, t: f64, rel: f64) -> Result<f64> {
        self.check_in_pulse(t)?;
        let est = integrate(
            |s| (self.zeta_in * s).exp_m1() * (self.zeta0 * (t - s)).exp(),
            0.0,
            t,
            &[],
            Tolerance::new(0.0, rel),
        )?;
        Ok(self.mu_a * self.s_in * (-self.mu_t * z.abs()).exp() / self.heat_capacity * est.value)
    }

    /// int_0^u zeta1(0; tau) dtau.
    pub fn kernel_exponent(&self, u: f64) -> Result<f64> {
        zeta1_integral(&self.thermal, &self.blood, self.mu_t, 0.0, u, self.t_p, self.t_crit)
    }

    /// T(t) = T(z, t_p) + mu_a/(rho c_p) int_{t_p}^t phi(s) exp(int_0^{t-s} zeta1) ds for t >= t_p.
    ///
    /// `phi(s)` is the fluence at `r_f`; it must vanish after `support_end`. `breakpoints` lists
    /// kinks of `phi` such as pulse edges.
    pub fn post_pulse<F>(
        &self,
        phi: F,
        z: f64,
        t: f64,
        support_end: f64,
        breakpoints: &[f64],
        tolerance_k: f64,
    ) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        if !(t >= self.t_p) {
            return Err(Error::domain(
                "temperature_post_pulse",
                format!("t = {t:e} precedes t_p = {:e}", self.t_p),
            ));
        }
        let base = self.in_pulse(z, self.t_p)?;
        let upper = t.min(support_end);
        if upper <= self.t_p {
            return Ok(base);
        }
        let mut kinks: Vec<f64> = breakpoints.to_vec();
        kinks.extend([t - self.t_p, t - self.t_crit]);
        let integrand = |s: f64| -> Result<f64> {
            let v = phi(s)?;
            if v == 0.0 {
                return Ok(0.0);
            }
            let e = self.kernel_exponent(t - s)?;
            if e > EXPONENT_LIMIT {
                return Err(Error::Overflow {
                    what: "Duhamel kernel exp(int zeta1)",
                    exponent: e,
                    limit: EXPONENT_LIMIT,
                });
            }
            Ok(v * e.exp())
        };
        let scale = self.mu_a / self.heat_capacity;
        let est = integrate_fallible(integrand, self.t_p, upper, &kinks, Tolerance::new(tolerance_k / scale, 1e-12))?;
        Ok(base + scale * est.value)
    }
}

/// Temperature over the multidomain: the Duhamel solution in the core, T_b elsewhere.
#[derive(Debug, Clone)]
pub struct ThermalModel {
    pub fluence: FluenceModel,
    pub solution: TemperatureSolution,
    pub tolerance_k: f64,
}

impl ThermalModel {
    pub fn new(fluence: FluenceModel, t_crit: f64) -> Result<Self> {
        let solution = TemperatureSolution::new(&fluence.scenario, t_crit)?;
        Ok(Self {
            fluence,
            solution,
            tolerance_k: DEFAULT_TOLERANCE_K,
        })
    }

    /// Pulse edges after the first pulse end.
    pub fn breakpoints(&self) -> Vec<f64> {
        let p = &self.fluence.scenario.protocol;
        let mut out = Vec::with_capacity(2 * p.pulses);
        for k in 0..p.pulses {
            let start = p.pulse_start(k);
            if k > 0 {
                out.push(start);
            }
            out.push(start + p.t_p);
        }
        out
    }

    /// T(r, z, t) [K]; for `r <= r_f` the value is independent of `r`.
    pub fn temperature(&self, r: f64, z: f64, t: f64) -> Result<f64> {
        let g = &self.fluence.scenario.geometry;
        if !g.contains(r, z) || !(t >= 0.0) {
            return Err(Error::domain(
                "temperature",
                format!("(r, z, t) = ({r:e}, {z:e}, {t:e}) outside the domain"),
            ));
        }
        if g.region(r, z.abs()) != Region::Core {
            return Ok(self.solution.t_b);
        }
        if t < self.solution.t_p {
            return self.solution.in_pulse(z, t);
        }
        let horizon = self.fluence.horizon();
        let r_f = g.r_f;
        self.solution.post_pulse(
            |s| self.fluence.phi(r_f, z, s),
            z,
            t,
            horizon,
            &self.breakpoints(),
            self.tolerance_k,
        )
    }
}

/// Outcome of the `t_crit` fixed point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalTimeEstimate {
    pub t_crit: f64,
    pub iterations: usize,
    /// Successive iterates, starting with the T_b upper bound.
    pub history: Vec<f64>,
}

/// First crossing of damage 1 along `trajectory`, searching horizons that double up to `cap`.
fn first_crossing<F>(scenario: &Scenario, trajectory: F, start: f64, cap: f64, breakpoints: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure = RefCell::new(None);
    let sampled = |t: f64| match trajectory(t) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let mut horizon = start.min(cap);
    loop {
        let res = critical_time(&scenario.arrhenius, &sampled, horizon, breakpoints);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e.context(format!("temperature trajectory up to {horizon:e} s")));
        }
        match res {
            Err(Error::HorizonExceeded { .. }) if horizon < cap => horizon = (2.0 * horizon).min(cap),
            other => return other,
        }
    }
}

/// Resolves `t_crit` self-consistently at the probe `(r, z)`: start from the T_b bound,
/// recompute the damage crossing of the resulting temperature, stop at 1% relative change.
pub fn resolve_critical_time(fluence: &FluenceModel, r: f64, z: f64) -> Result<CriticalTimeEstimate> {
    let scenario = &fluence.scenario;
    let upper = scenario.arrhenius.constant_temperature_time(scenario.blood.t_b)?;
    let cap = 2.0 * upper;
    let mut history = vec![upper];
    let mut current = upper;
    for iteration in 1..=T_CRIT_MAX_ITERATIONS {
        let model = ThermalModel::new(fluence.clone(), current)?;
        let mut kinks = model.breakpoints();
        kinks.push(current);
        let start = fluence.horizon().max(scenario.protocol.t_p);
        let next = first_crossing(scenario, |t| model.temperature(r, z, t), start, cap, &kinks)?;
        history.push(next);
        let change = (next - current).abs() / current;
        current = next;
        if change <= T_CRIT_REL_TOL {
            return Ok(CriticalTimeEstimate {
                t_crit: current,
                iterations: iteration,
                history,
            });
        }
    }
    let n = history.len();
    Err(Error::NoConvergence {
        iterations: T_CRIT_MAX_ITERATIONS,
        last_change: (history[n - 1] - history[n - 2]).abs() / history[n - 2],
    })
}

#[cfg(test)]
mod tests;
