use ablation_core::bioheat::{resolve_critical_time, ThermalModel};
use ablation_core::fluence::{FluenceModel, FluenceOptions};
use ablation_core::params::Registry;
use ablation_core::scenario::{Scenario, ScenarioRequest};
use ablation_core::tables::{table, TableKind, G_SCAN, SOURCE_COLUMNS};
use proptest::prelude::*;

const PAIRS: [&str; 2] = ["breast", "prostate"];

fn scenario(pair: &str, lambda: f64, power: f64, g: f64) -> Scenario {
    let request = ScenarioRequest {
        lambda_nm: Some(lambda),
        power_w: Some(power),
        g: Some(g),
        ..ScenarioRequest::new(pair)
    };
    Scenario::resolve(&Registry::bundled(), &request).unwrap()
}

/// log10 of S(ell-) / S(ell+) on the axis.
fn interface_gap(sc: &Scenario) -> f64 {
    let (inner, outer) = sc.source().interface_jump(0.0);
    (inner / outer).log10()
}

fn widest_gap() -> f64 {
    let (lo, hi, _) = G_SCAN;
    let mut widest = f64::NEG_INFINITY;
    for pair in PAIRS {
        for (lambda, power) in SOURCE_COLUMNS {
            for g in [lo, 0.9, hi] {
                widest = widest.max(interface_gap(&scenario(pair, lambda, power, g)).abs());
            }
        }
    }
    widest
}

#[test]
fn interface_gap_is_far_below_ten_decades() {
    let widest = widest_gap();
    assert!(widest > 0.0 && widest < 2.0, "{widest}");
}

#[test]
#[ignore = "not reachable with the bundled optics: the widest gap is under two decades"]
fn interface_gap_reaches_ten_decades() {
    for pair in PAIRS {
        for (lambda, power) in SOURCE_COLUMNS {
            let gap = interface_gap(&scenario(pair, lambda, power, 0.9));
            assert!(gap >= 10.0, "{pair} {lambda} nm: {gap:.3} decades");
        }
    }
}

#[test]
fn tables_follow_their_default_g() {
    let registry = Registry::bundled();
    for kind in TableKind::ALL {
        let t = table(&registry, kind, None).unwrap();
        assert_eq!(t.g, kind.default_g(&registry));
        assert!(t.rows.iter().all(|r| r.value.is_finite() && r.value > 0.0));
    }
}

#[test]
fn temperature_rises_during_a_pulse_and_holds_outside_the_core() {
    let sc = Scenario::bundled("breast", 810.0).unwrap();
    let fluence = FluenceModel::new(&sc, FluenceOptions::default()).unwrap();
    let t_crit = resolve_critical_time(&fluence, 0.0, 0.0).unwrap().t_crit;
    let thermal = ThermalModel::new(fluence, t_crit).unwrap();
    let t_b = sc.blood.t_b;
    let t_p = sc.protocol.t_p;
    let end = thermal.temperature(0.0, 0.0, t_p).unwrap();
    assert!(end > t_b);
    assert!(thermal.temperature(0.0, 0.0, 0.5 * t_p).unwrap() < end);
    assert_eq!(thermal.temperature(2.0 * sc.geometry.r_f, 0.0, t_p).unwrap(), t_b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fluence_is_even_in_z(z in 0.0..4e-3f64, frac in 0.0..1.0f64, pair in 0usize..2) {
        let sc = Scenario::bundled(PAIRS[pair], 810.0).unwrap();
        let model = FluenceModel::new(&sc, FluenceOptions::default()).unwrap();
        let t = frac * model.horizon();
        prop_assert_eq!(model.phi(0.0, z, t).unwrap(), model.phi(0.0, -z, t).unwrap());
    }

    #[test]
    fn source_scales_with_power(power in 0.1..10.0f64, z in 0.0..1e-2f64) {
        let base = scenario("prostate", 980.0, 1.0, 0.9).source();
        let scaled = scenario("prostate", 980.0, power, 0.9).source();
        let ratio = scaled.value(0.0, z, 0.0) / base.value(0.0, z, 0.0);
        prop_assert!((ratio / power - 1.0).abs() < 1e-12);
    }
}
