//! CSV and JSON writers. Both carry the resolved configuration and its SHA-256.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::Format;

/// Digits after the point in scientific notation; 17 significant digits round-trip any f64.
const MANTISSA_DIGITS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

/// Scientific notation with 17 significant digits; exact zeros as `0`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.MANTISSA_DIGITS$e}")
    }
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) => format_number(*x),
        Cell::Bool(b) => b.to_string(),
        Cell::Empty => String::new(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn json_field(cell: &Cell) -> Value {
    match cell {
        Cell::Num(x) if x.is_finite() => json!(x),
        Cell::Num(_) | Cell::Empty => Value::Null,
        Cell::Bool(b) => json!(b),
        Cell::Text(s) => json!(s),
    }
}

/// Provenance block written at the top of every output.
#[derive(Debug, Clone)]
pub struct Header {
    pub command: String,
    pub config: Value,
    pub g: f64,
    pub gamma_r: f64,
    pub notes: Vec<String>,
}

impl Header {
    pub fn new(command: &str, config: Value, g: f64, gamma_r: f64) -> Self {
        Self {
            command: command.to_string(),
            config,
            g,
            gamma_r,
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// SHA-256 of the compact JSON configuration.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.config).expect("configuration serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Named columns and their rows.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn render_csv(header: &Header, data: &Dataset) -> String {
    let mut s = String::new();
    s.push_str(&format!("# ablation {}\n", header.command));
    s.push_str(&format!("# config_sha256: {}\n", header.hash()));
    s.push_str(&format!("# g: {}\n", format_number(header.g)));
    s.push_str(&format!("# gamma_r: {}\n", format_number(header.gamma_r)));
    for n in &header.notes {
        s.push_str(&format!("# {n}\n"));
    }
    s.push_str(&format!("# config: {}\n", serde_json::to_string(&header.config).expect("serializes")));
    s.push_str(&data.columns.join(","));
    s.push('\n');
    for row in &data.rows {
        let fields: Vec<String> = row.iter().map(csv_field).collect();
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

pub fn render_json(header: &Header, data: &Dataset) -> String {
    let rows: Vec<Value> = data
        .rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            for (c, v) in data.columns.iter().zip(row) {
                m.insert((*c).to_string(), json_field(v));
            }
            Value::Object(m)
        })
        .collect();
    let doc = json!({
        "command": header.command,
        "config_sha256": header.hash(),
        "g": header.g,
        "gamma_r": header.gamma_r,
        "notes": header.notes,
        "config": header.config,
        "columns": data.columns,
        "rows": rows,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializes");
    text.push('\n');
    text
}

/// Writes `<dir>/<stem>.csv` or `.json` and returns the path.
pub fn write(dir: &Path, stem: &str, format: Format, header: &Header, data: &Dataset) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let (ext, text) = match format {
        Format::Csv => ("csv", render_csv(header, data)),
        Format::Json => ("json", render_json(header, data)),
    };
    let path = dir.join(format!("{stem}.{ext}"));
    fs::write(&path, text)?;
    Ok(path)
}

/// Writes a JSON document as-is.
pub fn write_json(dir: &Path, stem: &str, doc: &Value) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{stem}.json"));
    let mut text = serde_json::to_string_pretty(doc).expect("serializes");
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}
