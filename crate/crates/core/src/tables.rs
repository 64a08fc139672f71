//! Tabulated reference values and their reproduction from the registry.
//!
//! Each row carries the computed value, the reference value and both a relative and a
//! log10 deviation. The anisotropy g is not part of the tissue data, so every table is
//! computed for an explicit g and [`best_fit_g`] scans for the g that fits a table best.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{zeta0, Registry};
use crate::scenario::Scenario;
use crate::source::scattered_source;

/// g used for the zeta0 table unless overridden (the upper end of the tabulated range).
pub const ZETA0_TABLE_G: f64 = 0.99;
/// g used for the source-maximum table unless overridden (the lower end of the range).
pub const SOURCE_MAX_TABLE_G: f64 = 0.7;
/// Scan range and step for [`best_fit_g`].
pub const G_SCAN: (f64, f64, f64) = (0.70, 0.999, 0.001);

/// mu_a / mu_s' by (tissue, wavelength).
pub const RATIO_REFERENCE: [(&str, f64, f64); 12] = [
    ("breast_tumor", 810.0, 7.9e-3),
    ("breast_tissue", 810.0, 1.7e-2),
    ("prostate_tumor", 810.0, 8.2e-3),
    ("prostate_tissue", 810.0, 4.2e-2),
    ("breast_tumor", 980.0, 9.2e-3),
    ("breast_tissue", 980.0, 2.4e-2),
    ("prostate_tumor", 980.0, 1.0e-2),
    ("prostate_tissue", 980.0, 4.7e-2),
    ("breast_tumor", 1064.0, 8.9e-3),
    ("breast_tissue", 1064.0, 4.0e-2),
    ("prostate_tumor", 1064.0, 1.1e-2),
    ("prostate_tissue", 1064.0, 4.3e-2),
];

/// zeta0 [1/s] by (pair, wavelength).
pub const ZETA0_REFERENCE: [(&str, f64, f64); 6] = [
    ("breast", 810.0, 1.7e3),
    ("prostate", 810.0, 7.9e3),
    ("breast", 980.0, 1.4e3),
    ("prostate", 980.0, 7.3e3),
    ("breast", 1064.0, 1.7e3),
    ("prostate", 1064.0, 1.2e4),
];

/// Laser columns (wavelength [nm], peak power [W]) of the source table.
pub const SOURCE_COLUMNS: [(f64, f64); 4] = [(810.0, 5.0), (980.0, 5.0), (980.0, 1.3), (1064.0, 1.3)];

/// Where the source is read off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourcePoint {
    /// Tumor optics at the tip, z = 0.
    TumorMax,
    /// Tumor optics at z = ell.
    TumorMin,
    /// Healthy optics at z = ell.
    HealthyMax,
}

impl SourcePoint {
    pub fn label(self) -> &'static str {
        match self {
            SourcePoint::TumorMax => "tumor_max",
            SourcePoint::TumorMin => "tumor_min",
            SourcePoint::HealthyMax => "healthy_max",
        }
    }
}

/// S(0, z, t_p) [W/mm^3] by (pair, point), one value per entry of [`SOURCE_COLUMNS`].
pub const SOURCE_REFERENCE: [(&str, SourcePoint, [f64; 4]); 6] = [
    ("breast", SourcePoint::TumorMax, [198.0, 214.0, 56.0, 77.0]),
    ("breast", SourcePoint::TumorMin, [9.5e-28, 6.8e-25, 1.8e-25, 3.9e-28]),
    ("breast", SourcePoint::HealthyMax, [4.4e-42, 6.3e-46, 1.6e-46, 3.1e-64]),
    ("prostate", SourcePoint::TumorMax, [647.0, 828.0, 215.0, 420.0]),
    ("prostate", SourcePoint::TumorMin, [6.6e-62, 2.2e-59, 5.7e-60, 2.7e-78]),
    ("prostate", SourcePoint::HealthyMax, [2.6e-86, 6.6e-100, 1.7e-100, 6.8e-200]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    SourceMax,
    Zeta0,
    Ratio,
}

impl TableKind {
    pub const ALL: [TableKind; 3] = [TableKind::SourceMax, TableKind::Zeta0, TableKind::Ratio];

    pub fn name(self) -> &'static str {
        match self {
            TableKind::SourceMax => "source_max",
            TableKind::Zeta0 => "zeta0",
            TableKind::Ratio => "ratio",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            TableKind::SourceMax => "W/mm^3",
            TableKind::Zeta0 => "1/s",
            TableKind::Ratio => "1",
        }
    }

    /// g the table is computed with when the caller gives none.
    pub fn default_g(self, registry: &Registry) -> f64 {
        match self {
            TableKind::SourceMax => SOURCE_MAX_TABLE_G,
            TableKind::Zeta0 => ZETA0_TABLE_G,
            TableKind::Ratio => registry.g,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub lambda_nm: f64,
    pub power_w: Option<f64>,
    pub g: f64,
    pub value: f64,
    pub reference: f64,
    /// (value - reference) / reference.
    pub rel_deviation: f64,
    /// |log10(value / reference)|, in decades.
    pub decades: f64,
    /// Rows compared against the one-decade band; the others are reported only.
    pub checked: bool,
}

impl TableRow {
    fn new(label: String, lambda_nm: f64, power_w: Option<f64>, g: f64, value: f64, reference: f64, checked: bool) -> Self {
        Self {
            label,
            lambda_nm,
            power_w,
            g,
            value,
            reference,
            rel_deviation: (value - reference) / reference,
            decades: (value / reference).log10().abs(),
            checked,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub kind: TableKind,
    pub unit: &'static str,
    pub g: f64,
    pub rows: Vec<TableRow>,
}

impl Table {
    /// Largest deviation in decades over the checked rows.
    pub fn max_decades(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.checked)
            .map(|r| r.decades)
            .fold(0.0, f64::max)
    }

    /// Sum of squared decade deviations over the checked rows.
    pub fn misfit(&self) -> f64 {
        self.rows.iter().filter(|r| r.checked).map(|r| r.decades * r.decades).sum()
    }
}

/// Rounds to `digits` significant figures.
pub fn round_significant(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

/// mu_a / mu_s' for every tabulated tissue and wavelength (independent of g).
pub fn ratio_table(registry: &Registry) -> Result<Table> {
    let rows = RATIO_REFERENCE
        .iter()
        .map(|&(tissue, lambda, reference)| {
            let optics = registry.optics(tissue, lambda, None)?;
            Ok(TableRow::new(
                tissue.to_string(),
                lambda,
                None,
                optics.g,
                optics.absorption_scattering_ratio(),
                reference,
                true,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        kind: TableKind::Ratio,
        unit: TableKind::Ratio.unit(),
        g: registry.g,
        rows,
    })
}

fn scenario(registry: &Registry, pair: &str, lambda_nm: f64, power_w: Option<f64>, g: f64) -> Result<Scenario> {
    let request = crate::scenario::ScenarioRequest {
        lambda_nm: Some(lambda_nm),
        power_w,
        g: Some(g),
        ..crate::scenario::ScenarioRequest::new(pair)
    };
    Scenario::resolve(registry, &request)
}

/// zeta0 of the tumor side of each pair.
pub fn zeta0_table(registry: &Registry, g: f64) -> Result<Table> {
    let rows = ZETA0_REFERENCE
        .iter()
        .map(|&(pair, lambda, reference)| {
            let sc = scenario(registry, pair, lambda, None, g)?;
            let value = zeta0(&sc.inner_thermal, &sc.blood, sc.inner.mu_t());
            Ok(TableRow::new(pair.to_string(), lambda, None, g, value, reference, true))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        kind: TableKind::Zeta0,
        unit: TableKind::Zeta0.unit(),
        g,
        rows,
    })
}

/// Source at r = 0 during the pulse, in W/mm^3. Only the tip maxima are checked.
pub fn source_max_table(registry: &Registry, g: f64) -> Result<Table> {
    let mut rows = Vec::new();
    for &(pair, point, reference) in &SOURCE_REFERENCE {
        for (&(lambda, power), &want) in SOURCE_COLUMNS.iter().zip(&reference) {
            let sc = scenario(registry, pair, lambda, Some(power), g)?;
            let ell = sc.geometry.ell;
            let (optics, z) = match point {
                SourcePoint::TumorMax => (&sc.inner, 0.0),
                SourcePoint::TumorMin => (&sc.inner, ell),
                SourcePoint::HealthyMax => (&sc.outer, ell),
            };
            let value = scattered_source(optics, &sc.protocol, 0.0, z, 0.0) * 1e-9;
            let label = format!("{pair}_{}", point.label());
            rows.push(TableRow::new(
                label,
                lambda,
                Some(power),
                g,
                value,
                want,
                point == SourcePoint::TumorMax,
            ));
        }
    }
    Ok(Table {
        kind: TableKind::SourceMax,
        unit: TableKind::SourceMax.unit(),
        g,
        rows,
    })
}

pub fn table(registry: &Registry, kind: TableKind, g: Option<f64>) -> Result<Table> {
    let g = g.unwrap_or_else(|| kind.default_g(registry));
    match kind {
        TableKind::SourceMax => source_max_table(registry, g),
        TableKind::Zeta0 => zeta0_table(registry, g),
        TableKind::Ratio => ratio_table(registry),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GFit {
    pub g: f64,
    /// Sum of squared decade deviations at `g`.
    pub misfit: f64,
    pub max_decades: f64,
}

/// Grid scan of g over [`G_SCAN`] minimizing [`Table::misfit`].
pub fn best_fit_g(registry: &Registry, kind: TableKind) -> Result<GFit> {
    if kind == TableKind::Ratio {
        return Err(Error::Config("the ratio table does not depend on g".into()));
    }
    let (lo, hi, step) = G_SCAN;
    let count = ((hi - lo) / step).round() as usize;
    let mut best: Option<GFit> = None;
    for k in 0..=count {
        let g = lo + step * k as f64;
        let t = table(registry, kind, Some(g))?;
        let fit = GFit {
            g,
            misfit: t.misfit(),
            max_decades: t.max_decades(),
        };
        if best.map_or(true, |b| fit.misfit < b.misfit) {
            best = Some(fit);
        }
    }
    Ok(best.expect("scan is non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> Registry {
        Registry::bundled()
    }

    #[test]
    fn ratio_table_two_significant_figures() {
        let t = ratio_table(&registry()).unwrap();
        assert_eq!(t.rows.len(), 12);
        for row in &t.rows {
            assert_eq!(round_significant(row.value, 2), row.reference, "{row:?}");
        }
    }

    #[test]
    fn rounding() {
        assert_eq!(round_significant(7.94e-3, 2), 7.9e-3);
        assert_eq!(round_significant(0.0415, 2), 0.042);
        assert_eq!(round_significant(-1234.0, 2), -1200.0);
        assert_eq!(round_significant(0.0, 2), 0.0);
    }

    #[test]
    fn zeta0_table_within_a_decade_at_default_g() {
        let t = table(&registry(), TableKind::Zeta0, None).unwrap();
        assert_eq!(t.g, ZETA0_TABLE_G);
        assert!(t.max_decades() < 1.0, "{t:?}");
        let breast = &t.rows[0];
        assert!((breast.value - 1.48e3).abs() < 0.01e3, "{breast:?}");
    }

    #[test]
    fn zeta0_far_off_at_registry_g() {
        let t = table(&registry(), TableKind::Zeta0, Some(0.9)).unwrap();
        assert!(t.max_decades() > 1.0);
    }

    #[test]
    fn source_table_layout_and_maxima() {
        let t = table(&registry(), TableKind::SourceMax, None).unwrap();
        assert_eq!(t.rows.len(), 24);
        assert_eq!(t.rows.iter().filter(|r| r.checked).count(), 8);
        assert!(t.max_decades() < 1.0, "{t:?}");
        // breast tumor at the tip, 980 nm, 5 W
        assert!((t.rows[1].value - 214.0).abs() < 1.0, "{:?}", t.rows[1]);
    }

    #[test]
    fn source_power_scaling() {
        let t = table(&registry(), TableKind::SourceMax, Some(0.8)).unwrap();
        let ratio = t.rows[1].value / t.rows[2].value;
        assert!((ratio - 5.0 / 1.3).abs() < 1e-12);
    }

    #[test]
    fn best_fit_scan() {
        let r = registry();
        let z = best_fit_g(&r, TableKind::Zeta0).unwrap();
        assert!((z.g - 0.994).abs() < 1.5e-3, "{z:?}");
        let s = best_fit_g(&r, TableKind::SourceMax).unwrap();
        assert!((s.g - 0.772).abs() < 1.5e-3, "{s:?}");
        assert!(s.max_decades < 1.0);
        assert!(best_fit_g(&r, TableKind::Ratio).is_err());
    }
}
