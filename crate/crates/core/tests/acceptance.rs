//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ablation_core::bioheat::ThermalModel;
use ablation_core::damage::ArrheniusParams;
use ablation_core::fluence::{
    interpulse_series, phi_in_pulse, FluenceModel, FluenceOptions, SeriesFamily, DEFAULT_TERMS,
};
use ablation_core::oracle::{compare_bioheat, compare_radiative, CORE_GRIDS, PROBE_TOLERANCE};
use ablation_core::params::Registry;
use ablation_core::scenario::{Scenario, ScenarioRequest};
use ablation_core::source::irradiance;
use ablation_core::tables::{best_fit_g, ratio_table, round_significant, table, TableKind};
use ablation_core::validate::{
    coefficient_by_quadrature, damage_bounds, duhamel_probes, extension_residuals, in_pulse_residual,
    series_l2_error, wronskian_sweep, PROBE_SEED,
};
use ablation_core::Error;

type Outcome = Result<(bool, String), Error>;

struct Criterion {
    id: u32,
    name: &'static str,
    /// Wall-clock budget; `None` when the criterion states none.
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn ratio_table_reproduction() -> Outcome {
    let t = ratio_table(&Registry::bundled())?;
    let bad: Vec<String> = t
        .rows
        .iter()
        .filter(|r| round_significant(r.value, 2) != r.reference)
        .map(|r| format!("{} {} nm: {:.3e} vs {:.1e}", r.label, r.lambda_nm, r.value, r.reference))
        .collect();
    Ok((
        t.rows.len() == 12 && bad.is_empty(),
        format!("{} ratios, {} mismatches {bad:?}", t.rows.len(), bad.len()),
    ))
}

fn damage_bounds_criterion() -> Outcome {
    let p = ArrheniusParams::default();
    let (upper, lower) = damage_bounds(&p, 311.15)?;
    let du = ((upper - 9.9e3) / 9.9e3).abs();
    let dl = ((lower - 2.8871) / 2.8871).abs();
    Ok((
        du <= 0.10 && dl <= 0.15,
        format!("upper {upper:.4e} s ({:.1}% off 9.9e3), lower {lower:.4} s ({:.1}% off 2.8871)", 100.0 * du, 100.0 * dl),
    ))
}

fn tables_within_a_decade() -> Outcome {
    let registry = Registry::bundled();
    let mut ok = true;
    let mut parts = Vec::new();
    for kind in [TableKind::Zeta0, TableKind::SourceMax] {
        let t = table(&registry, kind, None)?;
        let fit = best_fit_g(&registry, kind)?;
        let worst = t.max_decades();
        ok &= worst < 1.0;
        parts.push(format!(
            "{}: g = {} worst {:.2} decades, best-fit g = {:.3} (worst {:.2})",
            kind.name(),
            t.g,
            worst,
            fit.g,
            fit.max_decades
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn wronskians() -> Outcome {
    let (jy, ik) = wronskian_sweep(0.05, 500.0, 200)?;
    Ok((jy <= 1e-10 && ik <= 1e-10, format!("max rel. deviation J/Y {jy:.2e}, I/K {ik:.2e} over 200 points")))
}

fn residual_orders() -> Outcome {
    let levels = [32, 64, 128];
    let core = in_pulse_residual(&Scenario::bundled("breast", 810.0)?, &levels)?;
    let [annulus, healthy] = extension_residuals(&Scenario::bundled("prostate", 980.0)?, &levels)?;
    let orders = [core.order, annulus.order, healthy.order];
    Ok((
        orders.iter().all(|o| (o - 2.0).abs() <= 0.3),
        format!(
            "orders: core {:.3}, tumor extension {:.3}, healthy extension {:.3} on {levels:?}",
            orders[0], orders[1], orders[2]
        ),
    ))
}

fn duhamel_consistency() -> Outcome {
    let worst = duhamel_probes(&Scenario::bundled("breast", 810.0)?, 50, PROBE_SEED)?;
    Ok((worst <= 1e-8, format!("max rel. difference {worst:.2e} over 50 probes")))
}

fn oracle_equivalence() -> Outcome {
    let (nr, nz) = CORE_GRIDS[CORE_GRIDS.len() - 1];
    let mut ok = true;
    let mut parts = Vec::new();
    for (pair, lambda) in [("breast", 810.0), ("prostate", 1064.0)] {
        let sc = Scenario::bundled(pair, lambda)?;
        let t = 0.5 * sc.protocol.t_p;
        let t_crit = sc.arrhenius.constant_temperature_time(sc.blood.t_b)?;
        let (_, light) = compare_radiative(&sc, nr, nz, t)?;
        let (_, heat) = compare_bioheat(&sc, nr, nz, t, t_crit)?;
        ok &= light.probes.len() == 10 && light.passed(PROBE_TOLERANCE) && heat.passed(PROBE_TOLERANCE);
        parts.push(format!(
            "{pair} {lambda}: fluence {:.2e}, temperature {:.2e}",
            light.max_rel_error, heat.max_rel_error
        ));
    }
    Ok((ok, format!("grid {nr}x{nz}, max rel. error at 10 probes: {}", parts.join("; "))))
}

fn series_initial_condition() -> Outcome {
    let sc = Scenario::bundled("breast", 810.0)?;
    let s = interpulse_series(&sc.inner, &sc.geometry, &sc.protocol, sc.gamma_r, SeriesFamily::Dirichlet, DEFAULT_TERMS)?;
    let err = series_l2_error(&s, DEFAULT_TERMS)?;
    let q = coefficient_by_quadrature(&s, 0)?;
    let rel = ((s.c[0] - q) / q).abs();
    Ok((
        s.terms() == DEFAULT_TERMS && err < s.tail_bound && rel <= 1e-8,
        format!(
            "{} terms, L2 error {err:.4e} vs tail bound {:.4e}, c_1 rel. difference {rel:.1e}",
            s.terms(),
            s.tail_bound
        ),
    ))
}

fn overflow_exponent(e: &Error) -> Option<f64> {
    match e.root_cause() {
        Error::Overflow { exponent, .. } if *exponent > 700.0 => Some(*exponent),
        _ => None,
    }
}

fn regime_guards() -> Outcome {
    let request = ScenarioRequest {
        lambda_nm: Some(1064.0),
        power_w: Some(1.3),
        t_p: Some(1e-11),
        g: Some(0.99),
        ..ScenarioRequest::new("breast")
    };
    let sc = Scenario::resolve(&Registry::bundled(), &request)?;
    let model = FluenceModel::new(&sc, FluenceOptions::default()).err();
    let direct = phi_in_pulse(&sc.inner, &sc.protocol, 0.0, sc.protocol.t_p).err();
    let a = model.as_ref().and_then(overflow_exponent);
    let b = direct.as_ref().and_then(overflow_exponent);
    // the same pulse at a lower anisotropy stays in range and must be finite
    let mild = FluenceModel::new(&sc.clone().with_g(0.9)?, FluenceOptions::default())?;
    let finite = [0.0, 0.5 * sc.protocol.t_p, sc.protocol.t_p]
        .iter()
        .map(|&t| mild.phi(0.0, 1e-3, t))
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .all(|v| v.is_finite());
    Ok((
        a.is_some() && b.is_some() && finite,
        format!("overflow exponents: model {a:?}, phi(0, 0, t_p) {b:?}; g = 0.9 finite: {finite}"),
    ))
}

fn trivial_invariants() -> Outcome {
    let request = ScenarioRequest {
        lambda_nm: Some(810.0),
        t_end: Some(23e-12),
        ..ScenarioRequest::new("breast")
    };
    let sc = Scenario::resolve(&Registry::bundled(), &request)?;
    let fluence = FluenceModel::new(&sc, FluenceOptions::default())?;
    let t_crit = sc.arrhenius.constant_temperature_time(sc.blood.t_b)?;
    let thermal = ThermalModel::new(fluence.clone(), t_crit)?;
    let g = sc.geometry;
    let p = sc.protocol;
    let radii = [0.0, 0.5 * g.r_f, g.r_f, 2.0 * g.r_f, 0.5 * g.r_i, g.r_i, 1.5 * g.r_i];
    let depths = [0.0, 1e-3, g.ell, 1.5 * g.ell, 0.9 * g.l];
    let mut failures = Vec::new();
    for &r in &radii {
        for &z in &depths {
            for zz in [z, -z] {
                if fluence.phi(r, zz, 0.0)? != 0.0 {
                    failures.push(format!("phi({r:e}, {zz:e}, 0) != 0"));
                }
                if thermal.temperature(r, zz, 0.0)? != sc.blood.t_b {
                    failures.push(format!("T({r:e}, {zz:e}, 0) != T_b"));
                }
            }
            for t in [0.3 * p.t_p, p.t_p, 4e-12, p.period() + 0.5 * p.t_p, 2.0 * p.period() + 7e-12] {
                if fluence.phi(r, z, t)? != fluence.phi(r, -z, t)? {
                    failures.push(format!("phi not even at ({r:e}, {z:e}, {t:e})"));
                }
            }
        }
    }
    for t in [0.0, 0.5 * p.t_p, p.period() + 0.2 * p.t_p] {
        if irradiance(&p, 2.0 * g.r_f, t) != 0.0 {
            failures.push(format!("E off-fiber at t = {t:e}"));
        }
    }
    for t in [1.5 * p.t_p, 0.5 * p.period(), p.period() + 3.0 * p.t_p, 2.0 * p.period() + 5.0 * p.t_p] {
        if irradiance(&p, 0.0, t) != 0.0 {
            failures.push(format!("E between pulses at t = {t:e}"));
        }
    }
    Ok((
        failures.is_empty(),
        format!("{} pulses, {} violations {failures:?}", p.pulses, failures.len()),
    ))
}

const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "ratio table reproduction", budget: Some(Duration::from_secs(1)), run: ratio_table_reproduction },
    Criterion { id: 2, name: "damage bounds", budget: None, run: damage_bounds_criterion },
    Criterion { id: 3, name: "zeta0 / source tables within one decade", budget: None, run: tables_within_a_decade },
    Criterion { id: 4, name: "Wronskian identities", budget: Some(Duration::from_secs(1)), run: wronskians },
    Criterion { id: 5, name: "PDE residual order", budget: Some(Duration::from_secs(60)), run: residual_orders },
    Criterion { id: 6, name: "Duhamel consistency", budget: Some(Duration::from_secs(5)), run: duhamel_consistency },
    Criterion { id: 7, name: "oracle equivalence", budget: Some(Duration::from_secs(120)), run: oracle_equivalence },
    Criterion { id: 8, name: "series initial condition", budget: None, run: series_initial_condition },
    Criterion { id: 9, name: "regime guards", budget: None, run: regime_guards },
    Criterion { id: 10, name: "trivial invariants", budget: None, run: trivial_invariants },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_budget = c.budget.map_or(true, |b| elapsed <= b);
        let (passed, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let budget = c.budget.map_or(String::new(), |b| format!(" / {:.0} s", b.as_secs_f64()));
        println!(
            "{} [{:>2}] {}: {detail} ({:.3} s{budget})",
            if passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
        if !passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
