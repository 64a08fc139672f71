use super::*;
use crate::fluence::FluenceOptions;
use crate::params::{zeta1, Registry};
use crate::scenario::ScenarioRequest;
use proptest::prelude::*;

fn scenario(pair: &str, lambda: f64) -> Scenario {
    Scenario::bundled(pair, lambda).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn quad_kernel(a: f64, b: f64, t: f64) -> f64 {
    integrate(|s| (a * s).exp_m1() * (b * (t - s)).exp(), 0.0, t, &[], Tolerance::new(0.0, 1e-13))
        .unwrap()
        .value
}

#[test]
fn perfusion_examples() {
    let th = ThermalProperties::new(1000.0, 0.5).unwrap();
    assert_eq!(perfusion_rate(&th, 0.0, 10.0).unwrap(), 0.5);
    assert!(rel(perfusion_rate(&th, 5.0, 10.0).unwrap(), 0.25) < 1e-15);
    assert_eq!(perfusion_rate(&th, 10.0, 10.0).unwrap(), 0.0);
    assert_eq!(perfusion_rate(&th, 20.0, 10.0).unwrap(), 0.0);
    assert!(perfusion_rate(&th, -1.0, 10.0).is_err());
    assert!(perfusion_rate(&th, 1.0, 0.0).is_err());
}

#[test]
fn kernel_matches_quadrature() {
    for (a, b, t) in [
        (7.0, 0.002, 1.0),
        (7e12, 1.7e3, 1e-12),
        (5.4e12, 1.4e3, 3e-13),
        (-3.0, 2.0, 0.7),
        (2.0, -1.0, 0.04),
        (1e-3, 5e-4, 10.0),
    ] {
        let k = kernel(a, b, t, false);
        assert!(rel(k, quad_kernel(a, b, t)) < 1e-10, "{a} {b} {t}");
    }
}

#[test]
fn kernel_series_seam_is_continuous() {
    let (a, b) = (3.0, 0.5);
    let seam = 0.1 / a;
    let below = kernel(a, b, seam * (1.0 - 1e-12), false);
    let above = kernel(a, b, seam * (1.0 + 1e-12), false);
    assert!(rel(below, above) < 1e-10);
}

#[test]
fn kernel_limit_forms() {
    for (a, b, t) in [(2.0, 2.0, 1.5), (3.0, 0.0, 0.8)] {
        let k = kernel(a, b, t, true);
        assert!(rel(k, quad_kernel(a, b, t)) < 1e-10);
    }
}

#[test]
fn in_pulse_examples() {
    let sc = scenario("breast", 810.0);
    let sol = TemperatureSolution::new(&sc, 100.0).unwrap();
    assert_eq!(sol.in_pulse(0.0, 0.0).unwrap(), sol.t_b);
    assert_eq!(sol.t_b, 311.15);
    let t = 0.8 * sol.t_p;
    // the two-term closed form as published
    let th = &sc.inner_thermal;
    let (zi, z0) = (sol.zeta_in, sol.zeta0);
    let literal = sol.mu_a
        * sol.s_in
        * (((zi * t).exp_m1() - (z0 * t).exp_m1()) / (th.rho * th.c_p * (zi - z0))
            - (z0 * t).exp_m1() / (th.k * sol.mu_t * sol.mu_t - sol.blood.c_b * sol.blood.rho_b * sol.blood.w(th)));
    assert!(rel(sol.excess_in_pulse(0.0, t).unwrap(), literal) < 1e-9);
    for z in [1e-4, 2e-3] {
        let ratio = sol.excess_in_pulse(z, t).unwrap() / sol.excess_in_pulse(0.0, t).unwrap();
        assert!(rel(ratio, (-sol.mu_t * z).exp()) < 1e-13);
    }
    assert!(sol.in_pulse(0.0, 2.0 * sol.t_p).is_err());
    assert!(rel(sol.zeta0 * sol.heat_capacity, sol.k_mu_t2 - sol.perfusion) < 1e-12);
}

#[test]
fn degenerate_perfusion_is_rejected() {
    let mut sc = scenario("prostate", 810.0);
    let mu_t = sc.inner.mu_t();
    let k = sc.inner_thermal.k;
    sc.inner_thermal = ThermalProperties::new(sc.inner_thermal.rho, k * mu_t * mu_t / sc.blood.c_b).unwrap();
    let err = TemperatureSolution::new(&sc, 50.0).unwrap_err();
    assert!(matches!(err, Error::Degenerate { .. }));
    let sol = TemperatureSolution::with_limit_forms(&sc, 50.0).unwrap();
    let t = 0.5 * sol.t_p;
    let direct = sol.mu_a * sol.s_in / sol.heat_capacity * quad_kernel(sol.zeta_in, sol.zeta0, t);
    assert!(rel(sol.excess_in_pulse(0.0, t).unwrap(), direct) < 1e-9);
}

#[test]
fn overflow_in_pulse() {
    let req = ScenarioRequest {
        lambda_nm: Some(1064.0),
        t_p: Some(1e-11),
        g: Some(0.99),
        ..ScenarioRequest::new("breast")
    };
    let sc = Scenario::resolve(&Registry::bundled(), &req).unwrap();
    let sol = TemperatureSolution::new(&sc, 100.0).unwrap();
    assert!(matches!(sol.excess_in_pulse(0.0, 1e-11), Err(Error::Overflow { .. })));
}

#[test]
fn post_pulse_trivial_cases() {
    let sc = scenario("breast", 980.0);
    let sol = TemperatureSolution::new(&sc, 100.0).unwrap();
    let at_tp = sol.in_pulse(1e-3, sol.t_p).unwrap();
    let v = sol.post_pulse(|_| Ok(1e9), 1e-3, sol.t_p, 1.0, &[], 1e-6).unwrap();
    assert_eq!(v, at_tp);
    let frozen = sol.post_pulse(|_| Ok(0.0), 1e-3, 0.5, 1.0, &[], 1e-6).unwrap();
    assert_eq!(frozen, at_tp);
    assert!(sol.post_pulse(|_| Ok(0.0), 1e-3, 0.5 * sol.t_p, 1.0, &[], 1e-6).is_err());
}

#[test]
fn post_pulse_constant_rate_closed_form() {
    let mut sc = scenario("prostate", 810.0);
    sc.inner_thermal = ThermalProperties::new(sc.inner_thermal.rho, 0.0).unwrap();
    let sol = TemperatureSolution::new(&sc, 1.0).unwrap();
    let phi0 = 3.2e9;
    let base = sol.in_pulse(0.0, sol.t_p).unwrap();
    for t in [1e-6, 1e-4, 2e-3] {
        let got = sol.post_pulse(|_| Ok(phi0), 0.0, t, f64::INFINITY, &[], 1e-9).unwrap();
        let want = sol.mu_a * phi0 / (sol.heat_capacity * sol.zeta0) * (sol.zeta0 * (t - sol.t_p)).exp_m1();
        assert!(rel(got - base, want) < 1e-9, "t={t}: {:e} vs {want:e}", got - base);
    }
}

#[test]
fn post_pulse_with_ramp_matches_nested_quadrature() {
    let sc = scenario("breast", 810.0);
    let t_crit = 2e-4;
    let sol = TemperatureSolution::new(&sc, t_crit).unwrap();
    let phi = |s: f64| 1e9 * (1.0 + (2e4 * s).sin());
    let t = 5e-4;
    let got = sol.post_pulse(|s| Ok(phi(s)), 0.0, t, f64::INFINITY, &[], 1e-9).unwrap();
    let th = sc.inner_thermal;
    let exponent = |u: f64| {
        integrate(
            |x| zeta1(&th, &sc.blood, sol.mu_t, 0.0, x, sol.t_p, t_crit).unwrap(),
            0.0,
            u,
            &[sol.t_p, t_crit],
            Tolerance::new(1e-14, 1e-13),
        )
        .unwrap()
        .value
    };
    let integral = integrate(
        |s| phi(s) * exponent(t - s).exp(),
        sol.t_p,
        t,
        &[t - t_crit],
        Tolerance::new(0.0, 1e-11),
    )
    .unwrap()
    .value;
    let want = sol.in_pulse(0.0, sol.t_p).unwrap() + sol.mu_a / sol.heat_capacity * integral;
    assert!((got - want).abs() < 1e-7 * (want - sol.t_b).abs().max(1e-6), "{got} vs {want}");
}

#[test]
fn post_pulse_overflow_is_reported() {
    let sc = scenario("breast", 810.0);
    let sol = TemperatureSolution::new(&sc, 1e4).unwrap();
    let t = 2.0 * EXPONENT_LIMIT / sol.zeta0;
    let err = sol.post_pulse(|_| Ok(1.0), 0.0, t, f64::INFINITY, &[], 1e-6).unwrap_err();
    assert!(matches!(err, Error::Overflow { .. }));
}

#[test]
fn thermal_model_field() {
    let sc = scenario("breast", 810.0);
    let fl = FluenceModel::new(&sc, FluenceOptions::default()).unwrap();
    let tm = ThermalModel::new(fl, 1e3).unwrap();
    let g = sc.geometry;
    for (r, z) in [(0.0, 0.0), (1e-4, 2e-3), (g.r_f, 4e-3), (5e-3, 0.0), (1.5e-2, 1.5e-2)] {
        assert_eq!(tm.temperature(r, z, 0.0).unwrap(), sc.blood.t_b);
    }
    assert_eq!(tm.temperature(5e-3, 0.0, 0.5e-12).unwrap(), sc.blood.t_b);
    let t = 0.5e-12;
    assert_eq!(tm.temperature(0.0, 1e-3, t).unwrap(), tm.temperature(2e-4, 1e-3, t).unwrap());
    let end = tm.temperature(0.0, 0.0, sc.protocol.t_p).unwrap();
    assert!(end > sc.blood.t_b);
    // the Dirichlet series vanishes at r_f, so nothing is added after the pulse
    assert_eq!(tm.temperature(0.0, 0.0, 5e-12).unwrap(), end);
    assert_eq!(tm.temperature(0.0, 0.0, 3.0).unwrap(), end);
    assert!(tm.temperature(0.1, 0.0, 1e-12).is_err());
}

#[test]
fn second_pulse_adds_heat() {
    let req = ScenarioRequest {
        lambda_nm: Some(810.0),
        t_end: Some(12e-12),
        ..ScenarioRequest::new("breast")
    };
    let sc = Scenario::resolve(&Registry::bundled(), &req).unwrap();
    assert_eq!(sc.protocol.pulses, 2);
    let fl = FluenceModel::new(&sc, FluenceOptions::default()).unwrap();
    let tm = ThermalModel::new(fl, 1e3).unwrap();
    let first = tm.temperature(0.0, 0.0, sc.protocol.t_p).unwrap();
    let mid = tm.temperature(0.0, 0.0, 11.5e-12).unwrap();
    let after = tm.temperature(0.0, 0.0, 12e-12).unwrap();
    assert!(first < mid && mid < after, "{first} {mid} {after}");
}

#[test]
fn critical_time_fixed_point() {
    let sc = scenario("breast", 810.0);
    let fl = FluenceModel::new(&sc, FluenceOptions::default()).unwrap();
    let est = resolve_critical_time(&fl, 0.0, 0.0).unwrap();
    let upper = sc.arrhenius.constant_temperature_time(sc.blood.t_b).unwrap();
    assert_eq!(est.history[0], upper);
    assert!(est.iterations <= T_CRIT_MAX_ITERATIONS);
    let tm = ThermalModel::new(fl, est.t_crit).unwrap();
    let t_max = tm.temperature(0.0, 0.0, sc.protocol.t_p).unwrap();
    let (lo, hi) = crate::damage::critical_time_bounds(&sc.arrhenius, sc.blood.t_b, t_max).unwrap();
    assert!(est.t_crit >= lo * (1.0 - 1e-9) && est.t_crit <= hi * (1.0 + 1e-9));
}

proptest! {
    #[test]
    fn in_pulse_closed_form_matches_quadrature(z in 0.0f64..5e-3, frac in 1e-6f64..1.0, pick in 0usize..4) {
        let (pair, lambda) = [("breast", 810.0), ("breast", 980.0), ("prostate", 810.0), ("prostate", 1064.0)][pick];
        let sol = TemperatureSolution::new(&scenario(pair, lambda), 50.0).unwrap();
        let t = frac * sol.t_p;
        let a = sol.excess_in_pulse(z, t).unwrap();
        let b = sol.excess_by_quadrature(z, t, 1e-12).unwrap();
        prop_assert!(rel(a, b) < 1e-8);
    }

    #[test]
    fn in_pulse_is_monotone_and_above_baseline(z in 0.0f64..5e-3, f1 in 0.0f64..1.0, f2 in 0.0f64..1.0) {
        let sol = TemperatureSolution::new(&scenario("prostate", 980.0), 50.0).unwrap();
        let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
        let a = sol.in_pulse(z, lo * sol.t_p).unwrap();
        let b = sol.in_pulse(z, hi * sol.t_p).unwrap();
        prop_assert!(a >= sol.t_b);
        prop_assert!(b >= a);
    }
}

