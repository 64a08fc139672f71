use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use ablation_core::bioheat::{resolve_critical_time, ThermalModel};
use ablation_core::fluence::{FluenceModel, FluenceOptions};
use ablation_core::oracle::{compare_bioheat, compare_radiative, Comparison, FieldProfile, CORE_GRIDS, PROBE_TOLERANCE};
use ablation_core::params::Registry;
use ablation_core::scenario::{Scenario, ScenarioRequest};
use ablation_core::tables::{best_fit_g, table, TableKind};
use ablation_core::validate::{run_suites, Suite};

use crate::output::{self, Dataset, Header};
use crate::{exit, Axis, Cli, Command, FdArgs, FdField, Failure, Field, ProfileArgs, RunArgs, SuiteArg, Which};

const PROFILE_COLUMNS: [&str; 6] = ["r_m", "z_m", "t_s", "value", "unit", "region"];

pub fn run(cli: &Cli) -> Result<u8, Failure> {
    let args = &cli.run;
    let registry = match &args.params {
        Some(path) => Registry::load(path)?,
        None => Registry::bundled(),
    };
    let request = request(args);
    let scenario = Scenario::resolve(&registry, &request)?;
    let base = json!({
        "params": args.params.as_ref().map_or("bundled".to_string(), |p| p.display().to_string()),
        "request": request,
        "scenario": scenario,
    });
    match &cli.command {
        Command::Tables { which } => tables(args, &registry, base, *which),
        Command::Profile(p) => profile(args, &scenario, base, p),
        Command::Validate { suite } => validate(args, &scenario, base, *suite),
        Command::FdRun(f) => fd_run(args, &scenario, base, f),
    }
}

fn request(args: &RunArgs) -> ScenarioRequest {
    ScenarioRequest {
        lambda_nm: args.lambda_nm,
        power_w: args.power_w,
        t_p: args.tp_s,
        delta_t: args.dt_s,
        t_end: args.tend_s,
        g: args.g,
        gamma_r: args.gamma_r,
        ..ScenarioRequest::new(&args.tissue)
    }
}

fn with_args(mut base: Value, command: &str, extra: Value) -> Value {
    base["command"] = json!(command);
    base["args"] = extra;
    base
}

fn report(path: &Path) {
    println!("wrote {}", path.display());
}

fn tables(args: &RunArgs, registry: &Registry, base: Value, which: Which) -> Result<u8, Failure> {
    let kinds: Vec<TableKind> = match which {
        Which::SourceMax => vec![TableKind::SourceMax],
        Which::Zeta0 => vec![TableKind::Zeta0],
        Which::Ratio => vec![TableKind::Ratio],
        Which::All => TableKind::ALL.to_vec(),
    };
    for kind in kinds {
        let t = table(registry, kind, args.g)?;
        let config = with_args(base.clone(), "tables", json!({ "table": kind.name(), "g": t.g }));
        let mut header = Header::new(&format!("tables {}", kind.name()), config, t.g, registry.gamma_r)
            .note(format!("unit: {}", t.unit))
            .note("rel_deviation = (value - reference) / reference; decades = |log10(value / reference)|");
        if kind != TableKind::Ratio {
            let fit = best_fit_g(registry, kind)?;
            header = header.note(format!(
                "best-fit g over checked rows: {:.3} (max {:.3} decades)",
                fit.g, fit.max_decades
            ));
        }
        let mut data = Dataset::new(&[
            "label",
            "lambda_nm",
            "power_w",
            "g",
            "value",
            "reference",
            "rel_deviation",
            "decades",
            "checked",
            "unit",
        ]);
        for row in &t.rows {
            data.push(vec![
                row.label.as_str().into(),
                row.lambda_nm.into(),
                row.power_w.into(),
                row.g.into(),
                row.value.into(),
                row.reference.into(),
                row.rel_deviation.into(),
                row.decades.into(),
                row.checked.into(),
                t.unit.into(),
            ]);
        }
        report(&output::write(&args.out, &format!("table_{}", kind.name()), args.format, &header, &data)?);
        println!(
            "{}: {} rows, g = {}, max deviation {:.3} decades over checked rows",
            kind.name(),
            t.rows.len(),
            t.g,
            t.max_decades()
        );
    }
    Ok(0)
}

fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![from],
        _ => (0..n).map(|k| from + (to - from) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn profile(args: &RunArgs, sc: &Scenario, base: Value, p: &ProfileArgs) -> Result<u8, Failure> {
    if p.samples == 0 || !(p.from.is_finite() && p.to.is_finite()) {
        return Err(Failure::config("sweep needs finite bounds and at least one sample"));
    }
    let t_fixed = p.t_s.unwrap_or(sc.protocol.t_p);
    // the field is defined through the interval after the last pulse
    let horizon = sc.protocol.pulses as f64 * sc.protocol.period();
    let snap = |t: f64| if t > horizon && t <= horizon * (1.0 + 1e-12) { horizon } else { t };
    let points: Vec<(f64, f64, f64)> = linspace(p.from, p.to, p.samples)
        .into_iter()
        .map(|x| match p.axis {
            Axis::R => (x, p.z_m, t_fixed),
            Axis::Z => (p.r_m, x, t_fixed),
            Axis::T => (p.r_m, p.z_m, snap(x)),
        })
        .collect();
    let g = &sc.geometry;
    if let Some(&(r, z, _)) = points.iter().find(|(r, z, _)| !g.contains(*r, *z)) {
        return Err(Failure::config(format!(
            "sweep point (r = {r:e} m, z = {z:e} m) outside the domain r <= {:e}, |z| <= {:e}",
            g.r_o, g.l
        )));
    }
    if let Some(&(_, _, t)) = points.iter().find(|(_, _, t)| !(*t >= 0.0 && *t <= horizon)) {
        return Err(Failure::config(format!("sweep time {t:e} s outside [0, {horizon:e}]")));
    }

    let mut notes = vec![format!("unit: {}", p.field.unit())];
    let values: Vec<f64> = match p.field {
        Field::Source => {
            let src = sc.source();
            points.iter().map(|&(r, z, t)| src.value(r, z, t)).collect()
        }
        Field::Fluence => {
            let m = FluenceModel::new(sc, FluenceOptions::default())?;
            points
                .par_iter()
                .map(|&(r, z, t)| m.phi(r, z, t))
                .collect::<Result<_, _>>()?
        }
        Field::Temperature => {
            let m = FluenceModel::new(sc, FluenceOptions::default())?;
            let t_crit = match p.t_crit_s {
                Some(v) => v,
                None => {
                    let est = resolve_critical_time(&m, 0.0, 0.0)?;
                    notes.push(format!("t_crit resolved at r = 0, z = 0 in {} iterations", est.iterations));
                    est.t_crit
                }
            };
            notes.push(format!("t_crit: {t_crit:.9e} s"));
            let th = ThermalModel::new(m, t_crit)?;
            points
                .par_iter()
                .map(|&(r, z, t)| th.temperature(r, z, t))
                .collect::<Result<_, _>>()?
        }
    };

    let axis = match p.axis {
        Axis::R => "r",
        Axis::Z => "z",
        Axis::T => "t",
    };
    let config = with_args(
        base,
        "profile",
        json!({
            "field": p.field.name(), "axis": axis, "from": p.from, "to": p.to, "samples": p.samples,
            "r_m": p.r_m, "z_m": p.z_m, "t_s": t_fixed, "t_crit_s": p.t_crit_s,
        }),
    );
    let mut header = Header::new(&format!("profile {} {axis}", p.field.name()), config, sc.inner.g, sc.gamma_r);
    for n in notes {
        header = header.note(n);
    }
    let mut data = Dataset::new(&PROFILE_COLUMNS);
    for (&(r, z, t), &v) in points.iter().zip(&values) {
        data.push(vec![
            r.into(),
            z.into(),
            t.into(),
            v.into(),
            p.field.unit().into(),
            g.region(r, z).label().into(),
        ]);
    }
    let stem = format!("profile_{}_{axis}", p.field.name());
    report(&output::write(&args.out, &stem, args.format, &header, &data)?);
    Ok(0)
}

fn validate(args: &RunArgs, sc: &Scenario, base: Value, suite: SuiteArg) -> Result<u8, Failure> {
    let suites: Vec<Suite> = match suite {
        SuiteArg::Specfun => vec![Suite::Specfun],
        SuiteArg::PdeResidual => vec![Suite::PdeResidual],
        SuiteArg::Duhamel => vec![Suite::Duhamel],
        SuiteArg::Damage => vec![Suite::Damage],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let reports = run_suites(&suites);
    let passed = reports.iter().all(|r| r.passed);
    for r in &reports {
        for c in &r.checks {
            println!(
                "{} {}/{}: value {} limit {} ({})",
                if c.passed { "PASS" } else { "FAIL" },
                r.suite,
                c.name,
                output::format_number(c.value),
                output::format_number(c.limit),
                c.detail
            );
        }
    }
    let names: Vec<&str> = suites.iter().map(|s| s.name()).collect();
    let config = with_args(base, "validate", json!({ "suites": names }));
    let header = Header::new("validate", config, sc.inner.g, sc.gamma_r)
        .note("suites run on bundled scenarios; the selected scenario is recorded only");
    let doc = json!({
        "command": "validate",
        "config_sha256": header.hash(),
        "config": header.config,
        "passed": passed,
        "suites": reports,
    });
    report(&output::write_json(&args.out, "validation", &doc)?);
    if args.format == crate::Format::Csv {
        let mut data = Dataset::new(&["suite", "check", "passed", "value", "limit", "detail"]);
        for r in &reports {
            for c in &r.checks {
                data.push(vec![
                    r.suite.into(),
                    c.name.as_str().into(),
                    c.passed.into(),
                    c.value.into(),
                    c.limit.into(),
                    c.detail.as_str().into(),
                ]);
            }
        }
        report(&output::write(&args.out, "validation", args.format, &header, &data)?);
    }
    Ok(if passed { 0 } else { exit::VALIDATION })
}

fn field_dataset(profile: &FieldProfile, sc: &Scenario, unit: &'static str) -> Dataset {
    let grid = &profile.grid;
    let mut data = Dataset::new(&PROFILE_COLUMNS);
    for j in 0..grid.nz {
        for i in 0..grid.nr {
            let (r, z) = (grid.r_center(i), grid.z_center(j));
            data.push(vec![
                r.into(),
                z.into(),
                profile.t.into(),
                (profile.baseline + profile.cell(i, j)).into(),
                unit.into(),
                sc.geometry.region(r, z).label().into(),
            ]);
        }
    }
    data
}

fn probe_dataset(cmp: &Comparison, unit: &'static str) -> Dataset {
    let mut data = Dataset::new(&["r_m", "z_m", "t_s", "fd", "analytic", "rel_error", "unit"]);
    for p in &cmp.probes {
        data.push(vec![
            p.r.into(),
            p.z.into(),
            p.t.into(),
            p.fd.into(),
            p.analytic.into(),
            p.rel_error.into(),
            unit.into(),
        ]);
    }
    data
}

fn fd_run(args: &RunArgs, sc: &Scenario, base: Value, f: &FdArgs) -> Result<u8, Failure> {
    let index = f.grid.unwrap_or(CORE_GRIDS.len() - 1);
    let &(nr, nz) = CORE_GRIDS
        .get(index)
        .ok_or_else(|| Failure::config(format!("grid index {index} out of range 0..{}", CORE_GRIDS.len())))?;
    if !(f.t_frac > 0.0 && f.t_frac <= 1.0) {
        return Err(Failure::config(format!("t-frac must lie in (0, 1], got {}", f.t_frac)));
    }
    let t = f.t_frac * sc.protocol.t_p;
    let t_crit = sc.arrhenius.constant_temperature_time(sc.blood.t_b)?;
    let mut ok = true;
    let fields: Vec<FdField> = match f.field {
        FdField::Both => vec![FdField::Fluence, FdField::Temperature],
        one => vec![one],
    };
    for field in fields {
        let (name, unit, probe_unit, (profile, cmp)) = match field {
            FdField::Fluence => ("fluence", "W/m^2", "W/m^2", compare_radiative(sc, nr, nz, t)?),
            _ => ("temperature", "K", "K above T_b", compare_bioheat(sc, nr, nz, t, t_crit)?),
        };
        let config = with_args(
            base.clone(),
            "fd-run",
            json!({ "field": name, "nr": nr, "nz": nz, "t_s": t }),
        );
        let header = Header::new(&format!("fd-run {name}"), config, sc.inner.g, sc.gamma_r)
            .note(format!("unit: {unit}"))
            .note(format!("grid {nr} x {nz} on [0, r_f] x [0, ell], dt {:.9e} s, {} steps", profile.dt, profile.steps))
            .note(format!("max relative probe error {:.3e} (tolerance {PROBE_TOLERANCE})", cmp.max_rel_error));
        report(&output::write(&args.out, &format!("fd_{name}"), args.format, &header, &field_dataset(&profile, sc, unit))?);
        report(&output::write(&args.out, &format!("fd_{name}_probes"), args.format, &header, &probe_dataset(&cmp, probe_unit))?);
        let pass = cmp.passed(PROBE_TOLERANCE);
        println!(
            "{} fd-run {name}: max relative error {:.3e} at {} probes",
            if pass { "PASS" } else { "FAIL" },
            cmp.max_rel_error,
            cmp.probes.len()
        );
        ok &= pass;
    }
    Ok(if ok { 0 } else { exit::VALIDATION })
}
