//! Output records: a metadata block plus a payload table, rendered as CSV
//! or JSON.
//!
//! CSV files carry the metadata as leading `# key = value` lines followed by
//! a header row and the data rows. Floats are written with 17 significant
//! digits so every value round-trips exactly. Resolved configuration lines
//! appear as `# config.<key> = <value>`; stripping the `# config.` prefix
//! gives a config file that reproduces the run.

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

pub const TOOL_NAME: &str = "vacrc";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub command: String,
    pub rng_algorithm: Option<String>,
    pub order_of_magnitude: Vec<&'static str>,
    pub config: Vec<(&'static str, String)>,
    /// Command-specific results outside the table.
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputRecord {
    pub fn new(command: &str, cfg: &RunConfig, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            rng_algorithm: None,
            order_of_magnitude: Vec::new(),
            config: cfg.echo(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: &str, value: impl Into<Cell>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn meta_value(&self, key: &str) -> Option<&Cell> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serialisable");
                s.push('\n');
                s
            }
        }
    }

    /// CSV header and data rows only.
    pub fn payload_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# tool = {TOOL_NAME} {TOOL_VERSION}\n"));
        out.push_str(&format!("# command = {}\n", self.command));
        if let Some(rng) = &self.rng_algorithm {
            out.push_str(&format!("# rng_algorithm = {rng}\n"));
        }
        for name in &self.order_of_magnitude {
            out.push_str(&format!("# order_of_magnitude.{name} = true\n"));
        }
        for (k, v) in &self.config {
            out.push_str(&format!("# config.{k} = {v}\n"));
        }
        for (k, v) in &self.meta {
            out.push_str(&format!("# meta.{k} = {}\n", v.csv()));
        }
        out.push_str(&self.payload_csv());
        out
    }

    pub fn to_json(&self) -> Value {
        let mut metadata = Map::new();
        metadata.insert("tool".into(), json!(TOOL_NAME));
        metadata.insert("version".into(), json!(TOOL_VERSION));
        metadata.insert("command".into(), json!(self.command));
        if let Some(rng) = &self.rng_algorithm {
            metadata.insert("rng_algorithm".into(), json!(rng));
        }
        let oom: Map<String, Value> = self
            .order_of_magnitude
            .iter()
            .map(|n| (n.to_string(), Value::Bool(true)))
            .collect();
        metadata.insert("order_of_magnitude".into(), Value::Object(oom));
        let config: Map<String, Value> = self.config.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        metadata.insert("config".into(), Value::Object(config));
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        metadata.insert("results".into(), Value::Object(meta));

        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), v.json()))
                        .collect(),
                )
            })
            .collect();
        json!({
            "metadata": Value::Object(metadata),
            "columns": self.columns,
            "rows": rows,
        })
    }
}

/// Extracts the resolved config lines from a rendered CSV record as a config
/// file body.
pub fn config_from_csv(csv: &str) -> String {
    csv.lines()
        .filter_map(|l| l.strip_prefix("# config."))
        .map(|l| format!("{l}\n"))
        .collect()
}
