//! Tabular output shared by every command. Both encodings carry the same
//! metadata, schema and rows.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

/// Seventeen significant digits, which round-trips every finite `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => format_number(*x),
            Cell::Num(_) => String::new(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Value,
}

impl Dataset {
    pub fn new(columns: Vec<Column>) -> Self {
        Dataset {
            columns,
            rows: Vec::new(),
            meta: Value::Null,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            bail!("row has {} cells but the schema has {} columns", row.len(), self.columns.len());
        }
        self.rows.push(row);
        Ok(())
    }

    /// Numeric column by name; text or missing cells become NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let at = self.columns.iter().position(|c| c.name == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[at] {
                    Cell::Num(x) => x,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn attach_meta(&mut self, config: &RunConfig, tolerances: Value) {
        self.meta = json!({
            "artifact": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "tolerances": tolerances,
            "units": self.columns.iter().map(|c| (c.name.clone(), Value::String(c.unit.clone()))).collect::<serde_json::Map<_, _>>(),
        });
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# {}", self.meta).unwrap();
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        writeln!(out, "{}", header.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<Value>> = self.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect();
        let doc = json!({
            "meta": self.meta,
            "columns": self.columns.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("dataset is valid JSON");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let text = self.render(format);
        match out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                match lock.write_all(text.as_bytes()).and_then(|_| lock.flush()) {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    other => Ok(other?),
                }
            }
        }
    }
}

/// Reads back either encoding. Column units are recovered from the metadata.
pub fn parse(text: &str) -> Result<Dataset> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_csv(text)
    }
}

fn units_for(meta: &Value, names: &[String]) -> Vec<Column> {
    names
        .iter()
        .map(|n| {
            let unit = meta["units"][n].as_str().unwrap_or_default();
            Column::new(n.clone(), unit)
        })
        .collect()
}

fn parse_json(text: &str) -> Result<Dataset> {
    let doc: Value = serde_json::from_str(text).context("dataset is not valid JSON")?;
    let names: Vec<String> = serde_json::from_value(doc["columns"].clone()).context("missing `columns`")?;
    let meta = doc["meta"].clone();
    let mut ds = Dataset::new(units_for(&meta, &names));
    ds.meta = meta;
    let rows = doc["rows"].as_array().context("missing `rows`")?;
    for row in rows {
        let cells = row
            .as_array()
            .context("row is not an array")?
            .iter()
            .map(|v| match v {
                Value::Null => Ok(Cell::Num(f64::NAN)),
                Value::Number(n) => Ok(Cell::Num(n.as_f64().unwrap_or(f64::NAN))),
                Value::String(s) => Ok(Cell::Text(s.clone())),
                other => bail!("unexpected cell {other}"),
            })
            .collect::<Result<Vec<_>>>()?;
        ds.push(cells)?;
    }
    Ok(ds)
}

fn parse_csv(text: &str) -> Result<Dataset> {
    let mut lines = text.lines();
    let meta_line = lines.next().context("empty dataset")?;
    let meta: Value = serde_json::from_str(meta_line.strip_prefix("# ").context("missing metadata line")?)?;
    let names: Vec<String> = lines
        .next()
        .context("missing header")?
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut ds = Dataset::new(units_for(&meta, &names));
    ds.meta = meta;
    for line in lines.filter(|l| !l.is_empty()) {
        let cells = line
            .split(',')
            .map(|s| {
                if s.is_empty() {
                    Cell::Num(f64::NAN)
                } else {
                    s.parse::<f64>().map(Cell::Num).unwrap_or_else(|_| Cell::Text(s.to_owned()))
                }
            })
            .collect();
        ds.push(cells)?;
    }
    Ok(ds)
}
