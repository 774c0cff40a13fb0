//! Tabular reports written as CSV, JSON or JSON lines, each headed by the
//! resolved configuration.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use bc_moments::apps::fmt_f64;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const CONFIG_PREFIX: &str = "# config: ";

/// A finite real as a JSON number; infinities and NaN as strings.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(fmt_f64(x)), Value::Number)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Run-level results (slopes, pass counts, metadata) written before the rows.
    pub summary: BTreeMap<String, Value>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn row_object(&self, row: &[Value]) -> Map<String, Value> {
        self.columns.iter().cloned().zip(row.iter().cloned()).collect()
    }
}

fn header(cfg: &RunConfig) -> Value {
    let mut v = cfg.echo();
    if !cfg.deterministic {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        v["timestamp"] = json!(secs);
    }
    v
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => "NA".into(),
        Value::String(s) => bc_moments::apps::csv_field(s),
        other => other.to_string(),
    }
}

pub fn render(cfg: &RunConfig, table: &Table) -> String {
    let config = header(cfg);
    match cfg.format {
        Format::Csv => {
            let mut out = format!("{CONFIG_PREFIX}{config}\n");
            for (k, v) in &table.summary {
                match v {
                    Value::String(s) => out.push_str(&format!("# {k}: {s}\n")),
                    v => out.push_str(&format!("# {k}: {v}\n")),
                }
            }
            out.push_str(&table.columns.join(","));
            out.push('\n');
            for row in &table.rows {
                out.push_str(&row.iter().map(csv_cell).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = table.rows.iter().map(|r| Value::Object(table.row_object(r))).collect();
            let doc = json!({
                "config": config,
                "summary": table.summary,
                "columns": table.columns,
                "rows": rows,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Jsonl => {
            let mut first = Map::new();
            first.insert("type".into(), json!("config"));
            if let Value::Object(c) = config {
                first.extend(c);
            }
            let mut out = format!("{}\n", Value::Object(first));
            if !table.summary.is_empty() {
                let mut summary = Map::new();
                summary.insert("type".into(), json!("summary"));
                summary.extend(table.summary.clone());
                out.push_str(&Value::Object(summary).to_string());
                out.push('\n');
            }
            for row in &table.rows {
                out.push_str(&Value::Object(table.row_object(row)).to_string());
                out.push('\n');
            }
            out
        }
    }
}

pub fn write(cfg: &RunConfig, table: &Table, path: Option<&std::path::Path>) -> Result<(), CliError> {
    let text = render(cfg, table);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}
