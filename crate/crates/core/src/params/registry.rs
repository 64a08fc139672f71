use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::optics::OpticalProperties;
use super::thermal::{BloodConstants, ThermalProperties};
use crate::damage::ArrheniusParams;
use crate::error::{Error, Result};
use crate::source::Geometry;

const BUNDLED: &str = include_str!("../../data/tissues.params");

/// Wavelength-independent optical data of a tissue plus its absorption table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TissueOptics {
    /// (wavelength [nm], mu_a [1/m]) sorted by wavelength.
    pub mu_a: Vec<(f64, f64)>,
    /// [1/m].
    pub a: f64,
    pub b: f64,
    pub n: f64,
    pub g: Option<f64>,
}

impl TissueOptics {
    pub fn mu_a_at(&self, lambda_nm: f64) -> Option<f64> {
        self.mu_a
            .iter()
            .find(|(l, _)| (l - lambda_nm).abs() <= 1e-9 * lambda_nm)
            .map(|&(_, m)| m)
    }
}

/// Tumor (inner) and healthy (outer) tissue names for optics and heat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TissuePair {
    pub inner: String,
    pub outer: String,
    pub inner_thermal: String,
    pub outer_thermal: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaserDefaults {
    pub power_w: f64,
    pub lambda_nm: f64,
    pub t_p: f64,
    /// Pulse interval as a multiple of the pulse width.
    pub interval_factor: f64,
    pub pulses: u32,
}

/// Parsed parameter file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Registry {
    pub optics: BTreeMap<String, TissueOptics>,
    pub thermal: BTreeMap<String, ThermalProperties>,
    pub pairs: BTreeMap<String, TissuePair>,
    pub blood: BloodConstants,
    pub g: f64,
    pub gamma_r: f64,
    pub laser: LaserDefaults,
    pub geometry: Geometry,
    pub arrhenius: ArrheniusParams,
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Flat `key = value` text. Later sources override earlier ones; a key repeated within one
/// source is an error.
fn parse_entries(sources: &[(&str, &str)]) -> Result<BTreeMap<String, String>> {
    let mut merged = BTreeMap::new();
    for (origin, text) in sources {
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config(format!("{origin}:{}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(config(format!("{origin}:{}: empty key or value", lineno + 1)));
            }
            if seen.insert(key.clone(), lineno + 1).is_some() {
                return Err(config(format!("{origin}:{}: duplicate key `{key}`", lineno + 1)));
            }
            merged.insert(key, value);
        }
    }
    Ok(merged)
}

fn number(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| config(format!("`{key}`: `{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(config(format!("`{key}`: value must be finite")));
    }
    Ok(v)
}

/// Factor converting `1/<unit>` to 1/m.
fn inverse_length_factor(unit: &str) -> Option<f64> {
    match unit {
        "per_m" => Some(1.0),
        "per_cm" => Some(100.0),
        "per_mm" => Some(1000.0),
        _ => None,
    }
}

fn length_factor(unit: &str) -> Option<f64> {
    match unit {
        "m" => Some(1.0),
        "cm" => Some(1e-2),
        "mm" => Some(1e-3),
        "um" => Some(1e-6),
        _ => None,
    }
}

/// Splits `mu_a_per_cm` into (`mu_a`, `per_cm`), `r_f_mm` into (`r_f`, `mm`).
fn split_unit<'a>(field: &'a str, stems: &[&str]) -> Option<(&'a str, &'a str)> {
    for stem in stems {
        if let Some(rest) = field.strip_prefix(stem) {
            if let Some(unit) = rest.strip_prefix('_') {
                return Some((&field[..stem.len()], unit));
            }
        }
    }
    None
}

#[derive(Default)]
struct OpticsDraft {
    mu_a: Option<Vec<(f64, f64)>>,
    a: Option<f64>,
    b: Option<f64>,
    n: Option<f64>,
    g: Option<f64>,
}

#[derive(Default)]
struct ThermalDraft {
    rho: Option<f64>,
    omega0: Option<f64>,
}

fn parse_absorption(key: &str, value: &str, factor: f64) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for item in value.split_whitespace() {
        let (l, m) = item
            .split_once(':')
            .ok_or_else(|| config(format!("`{key}`: expected `wavelength:value`, got `{item}`")))?;
        let l = number(key, l)?;
        let m = number(key, m)? * factor;
        if l <= 0.0 || m < 0.0 {
            return Err(config(format!("`{key}`: invalid entry `{item}`")));
        }
        out.push((l, m));
    }
    if out.is_empty() {
        return Err(config(format!("`{key}`: no entries")));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

impl Registry {
    /// The parameter set shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_sources(&[("bundled", BUNDLED)]).expect("bundled parameter file is valid")
    }

    pub fn bundled_text() -> &'static str {
        BUNDLED
    }

    /// Bundled values overridden by `text`.
    pub fn with_overrides(origin: &str, text: &str) -> Result<Self> {
        Self::from_sources(&[("bundled", BUNDLED), (origin, text)])
    }

    /// Bundled values overridden by the file at `path`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
        Self::with_overrides(&path.display().to_string(), &text)
    }

    pub fn from_sources(sources: &[(&str, &str)]) -> Result<Self> {
        let entries = parse_entries(sources)?;
        let mut optics: BTreeMap<String, OpticsDraft> = BTreeMap::new();
        let mut thermal: BTreeMap<String, ThermalDraft> = BTreeMap::new();
        let mut pairs: BTreeMap<String, [Option<String>; 4]> = BTreeMap::new();
        let mut blood_rho = None;
        let mut blood_t_b = None;
        let mut g = None;
        let mut gamma_r = None;
        let mut laser = BTreeMap::new();
        let mut geometry = BTreeMap::new();
        let mut damage = BTreeMap::new();

        for (key, value) in &entries {
            let parts: Vec<&str> = key.split('.').collect();
            let unknown = || config(format!("unknown key `{key}`"));
            match parts.as_slice() {
                ["tissue", name, field] => {
                    let name = name.to_string();
                    if let Some((stem, unit)) = split_unit(field, &["mu_a", "a"]) {
                        let factor = inverse_length_factor(unit).ok_or_else(unknown)?;
                        let d = optics.entry(name).or_default();
                        if stem == "mu_a" {
                            d.mu_a = Some(parse_absorption(key, value, factor)?);
                        } else {
                            d.a = Some(number(key, value)? * factor);
                        }
                        continue;
                    }
                    match *field {
                        "b" => optics.entry(name).or_default().b = Some(number(key, value)?),
                        "n" => optics.entry(name).or_default().n = Some(number(key, value)?),
                        "g" => optics.entry(name).or_default().g = Some(number(key, value)?),
                        "rho" => thermal.entry(name).or_default().rho = Some(number(key, value)?),
                        "omega0" => thermal.entry(name).or_default().omega0 = Some(number(key, value)?),
                        _ => return Err(unknown()),
                    }
                }
                ["blood", "rho"] => blood_rho = Some(number(key, value)?),
                ["blood", "t_b_c"] => blood_t_b = Some(number(key, value)? + 273.15),
                ["blood", "t_b_k"] => blood_t_b = Some(number(key, value)?),
                ["pair", name, side] => {
                    let slot = match *side {
                        "inner" => 0,
                        "outer" => 1,
                        "inner_thermal" => 2,
                        "outer_thermal" => 3,
                        _ => return Err(unknown()),
                    };
                    pairs.entry(name.to_string()).or_default()[slot] = Some(value.clone());
                }
                ["model", "g"] => g = Some(number(key, value)?),
                ["model", "gamma_r"] => gamma_r = Some(number(key, value)?),
                ["laser", field] => {
                    laser.insert(field.to_string(), number(key, value)?);
                }
                ["geometry", field] => {
                    let (stem, unit) =
                        split_unit(field, &["r_f", "r_i", "r_o", "ell", "l"]).ok_or_else(unknown)?;
                    let factor = length_factor(unit).ok_or_else(unknown)?;
                    geometry.insert(stem.to_string(), number(key, value)? * factor);
                }
                ["damage", field] => {
                    damage.insert(field.to_string(), number(key, value)?);
                }
                _ => return Err(unknown()),
            }
        }

        let mut optics_out = BTreeMap::new();
        for (name, d) in optics {
            let missing = |what: &str| config(format!("tissue `{name}`: missing optical field `{what}`"));
            let t = TissueOptics {
                mu_a: d.mu_a.ok_or_else(|| missing("mu_a"))?,
                a: d.a.ok_or_else(|| missing("a"))?,
                b: d.b.ok_or_else(|| missing("b"))?,
                n: d.n.ok_or_else(|| missing("n"))?,
                g: d.g,
            };
            for &(l, m) in &t.mu_a {
                OpticalProperties::new(m, t.a, t.b, t.g.unwrap_or(0.9), t.n, l)
                    .map_err(|e| config(format!("tissue `{name}`: {e}")))?;
            }
            optics_out.insert(name, t);
        }
        let mut thermal_out = BTreeMap::new();
        for (name, d) in thermal {
            let missing = |what: &str| config(format!("tissue `{name}`: missing thermal field `{what}`"));
            let t = ThermalProperties::new(d.rho.ok_or_else(|| missing("rho"))?, d.omega0.ok_or_else(|| missing("omega0"))?)
                .map_err(|e| config(format!("tissue `{name}`: {e}")))?;
            thermal_out.insert(name, t);
        }
        let mut pairs_out = BTreeMap::new();
        for (name, slots) in pairs {
            let [inner, outer, inner_thermal, outer_thermal] = slots;
            let missing = |what: &str| config(format!("pair `{name}`: missing `{what}`"));
            let p = TissuePair {
                inner: inner.ok_or_else(|| missing("inner"))?,
                outer: outer.ok_or_else(|| missing("outer"))?,
                inner_thermal: inner_thermal.ok_or_else(|| missing("inner_thermal"))?,
                outer_thermal: outer_thermal.ok_or_else(|| missing("outer_thermal"))?,
            };
            for o in [&p.inner, &p.outer] {
                if !optics_out.contains_key(o) {
                    return Err(config(format!("pair `{name}`: no optical data for `{o}`")));
                }
            }
            for t in [&p.inner_thermal, &p.outer_thermal] {
                if !thermal_out.contains_key(t) {
                    return Err(config(format!("pair `{name}`: no thermal data for `{t}`")));
                }
            }
            pairs_out.insert(name, p);
        }

        let blood = BloodConstants::new(
            blood_rho.ok_or_else(|| config("missing `blood.rho`"))?,
            blood_t_b.unwrap_or(BloodConstants::DEFAULT_T_B),
        )
        .map_err(|e| config(e.to_string()))?;
        let g = g.unwrap_or(0.9);
        check_g(g)?;
        let gamma_r = gamma_r.unwrap_or(0.5);

        let take = |map: &mut BTreeMap<String, f64>, section: &str, field: &str| {
            map.remove(field)
                .ok_or_else(|| config(format!("missing `{section}.{field}`")))
        };
        let laser_defaults = LaserDefaults {
            power_w: take(&mut laser, "laser", "power_w")?,
            lambda_nm: take(&mut laser, "laser", "lambda_nm")?,
            t_p: take(&mut laser, "laser", "t_p_s")?,
            interval_factor: laser.remove("interval_factor").unwrap_or(10.0),
            pulses: {
                let p = laser.remove("pulses").unwrap_or(1.0);
                if p < 1.0 || p.fract() != 0.0 {
                    return Err(config(format!("`laser.pulses` must be a positive integer, got {p}")));
                }
                p as u32
            },
        };
        if let Some(k) = laser.keys().next() {
            return Err(config(format!("unknown key `laser.{k}`")));
        }
        let geometry = Geometry::new(
            take(&mut geometry, "geometry", "r_f")?,
            take(&mut geometry, "geometry", "r_i")?,
            take(&mut geometry, "geometry", "r_o")?,
            take(&mut geometry, "geometry", "ell")?,
            take(&mut geometry, "geometry", "l")?,
        )
        .map_err(|e| config(e.to_string()))?;
        let arrhenius = ArrheniusParams::new(
            take(&mut damage, "damage", "a_per_s")?,
            take(&mut damage, "damage", "e_a_j_per_mol")?,
            damage.remove("r_j_per_mol_k").unwrap_or(8.314),
        )
        .map_err(|e| config(e.to_string()))?;
        if let Some(k) = damage.keys().next() {
            return Err(config(format!("unknown key `damage.{k}`")));
        }

        Ok(Self {
            optics: optics_out,
            thermal: thermal_out,
            pairs: pairs_out,
            blood,
            g,
            gamma_r,
            laser: laser_defaults,
            geometry,
            arrhenius,
        })
    }

    pub fn tissue_optics(&self, name: &str) -> Result<&TissueOptics> {
        self.optics
            .get(name)
            .ok_or_else(|| config(format!("unknown tissue `{name}`")))
    }

    /// Optical properties of `name` at `lambda_nm`, with `g` or else the tissue/global default.
    pub fn optics(&self, name: &str, lambda_nm: f64, g: Option<f64>) -> Result<OpticalProperties> {
        let t = self.tissue_optics(name)?;
        let mu_a = t.mu_a_at(lambda_nm).ok_or_else(|| {
            config(format!("tissue `{name}` has no absorption data at {lambda_nm} nm"))
        })?;
        let g = g.or(t.g).unwrap_or(self.g);
        check_g(g)?;
        OpticalProperties::new(mu_a, t.a, t.b, g, t.n, lambda_nm).map_err(|e| config(e.to_string()))
    }

    pub fn thermal(&self, name: &str) -> Result<ThermalProperties> {
        self.thermal
            .get(name)
            .copied()
            .ok_or_else(|| config(format!("no thermal data for tissue `{name}`")))
    }

    pub fn pair(&self, name: &str) -> Result<&TissuePair> {
        self.pairs.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.pairs.keys().map(String::as_str).collect();
            config(format!("unknown tissue pair `{name}` (known: {})", known.join(", ")))
        })
    }

    /// Wavelengths with absorption data for every optical tissue.
    pub fn common_wavelengths(&self) -> Vec<f64> {
        let mut iter = self.optics.values();
        let Some(first) = iter.next() else {
            return Vec::new();
        };
        let rest: Vec<&TissueOptics> = iter.collect();
        first
            .mu_a
            .iter()
            .map(|&(l, _)| l)
            .filter(|&l| rest.iter().all(|t| t.mu_a_at(l).is_some()))
            .collect()
    }
}

/// Anisotropy accepted from configuration.
pub fn check_g(g: f64) -> Result<()> {
    if !(0.7..1.0).contains(&g) {
        return Err(config(format!("g must lie in [0.7, 1), got {g}")));
    }
    Ok(())
}
