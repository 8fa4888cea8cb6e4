//! Tabular results and their CSV / JSON serialisation.
//!
//! Floats are written as `{:.16e}` (17 significant digits), so every value
//! round-trips exactly. Non-finite values become `null` in JSON.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use radiance_core::ModelParams;
use serde_json::{Map, Number, Value};

use crate::cli::{Format, OutputArgs, Units};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::Num(x.unwrap_or(f64::NAN))
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

/// Output of one command: a table, an optional summary and the resolved
/// parameters it was computed with.
#[derive(Debug, Clone)]
pub struct Report {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(&'static str, Cell)>,
    pub params: ModelParams,
    pub units: Units,
    pub seed: Option<u64>,
}

impl Report {
    pub fn new(columns: Vec<Column>, params: ModelParams, units: Units) -> Self {
        Self { columns, rows: Vec::new(), summary: Vec::new(), params, units, seed: None }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(format_float(x).parse::<Number>().expect("formatted float is valid JSON"))
    } else {
        Value::Null
    }
}

fn params_json(p: &ModelParams, units: Units) -> Value {
    let c = p.constants();
    let mut m = Map::new();
    m.insert("units".into(), Value::from(units_name(units)));
    for (k, v) in [
        ("mass", p.mass()),
        ("charge", p.charge()),
        ("omega0", p.omega0()),
        ("kappa", p.kappa()),
        ("lambda", p.lambda()),
        ("beta", p.beta()),
        ("hbar", c.hbar),
        ("c", c.c),
        ("epsilon0", c.epsilon0),
        ("validity_bound", p.validity_bound()),
    ] {
        m.insert(k.into(), num(v));
    }
    Value::Object(m)
}

pub fn units_name(units: Units) -> &'static str {
    match units {
        Units::Si => "si",
        Units::Natural => "natural",
    }
}

fn meta(report: &Report, command: &str, config: &BTreeMap<String, String>) -> Value {
    let mut m = Map::new();
    m.insert("tool".into(), Value::from("radiance"));
    m.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), Value::from(command));
    m.insert("seed".into(), report.seed.map_or(Value::Null, Value::from));
    m.insert(
        "config".into(),
        Value::Object(config.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect()),
    );
    m.insert("params".into(), params_json(&report.params, report.units));
    m.insert(
        "columns".into(),
        Value::Array(
            report
                .columns
                .iter()
                .map(|c| {
                    let mut o = Map::new();
                    o.insert("name".into(), Value::from(c.name));
                    o.insert("unit".into(), Value::from(c.unit));
                    Value::Object(o)
                })
                .collect(),
        ),
    );
    Value::Object(m)
}

pub fn render_csv(report: &Report) -> String {
    let mut out = String::new();
    let header: Vec<&str> = report.columns.iter().map(|c| c.name).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in &report.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(report: &Report, command: &str, config: &BTreeMap<String, String>) -> String {
    let mut doc = Map::new();
    doc.insert("meta".into(), meta(report, command, config));
    let data = report
        .rows
        .iter()
        .map(|row| {
            Value::Object(report.columns.iter().zip(row).map(|(c, v)| (c.name.to_owned(), v.json())).collect())
        })
        .collect();
    doc.insert("data".into(), Value::Array(data));
    if !report.summary.is_empty() {
        doc.insert(
            "summary".into(),
            Value::Object(report.summary.iter().map(|(k, v)| ((*k).to_owned(), v.json())).collect()),
        );
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values always serialise");
    s.push('\n');
    s
}

/// Path of the metadata written next to a CSV file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Writes the report to stdout or `--output`. CSV output holds only the
/// header and rows; when written to a file its metadata (and summary) go
/// to a `.meta.json` sidecar.
pub fn emit(
    report: &Report,
    command: &str,
    config: &BTreeMap<String, String>,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let body = match out.format {
        Format::Csv => render_csv(report),
        Format::Json => render_json(report, command, config),
    };
    match &out.output {
        Some(path) => {
            write_file(path, &body)?;
            if out.format == Format::Csv {
                let mut meta_only = report.clone();
                meta_only.rows.clear();
                write_file(&sidecar_path(path), &render_json(&meta_only, command, config))?;
            }
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}
