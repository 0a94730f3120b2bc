//! Versioned table output, byte-identical across runs and worker counts.
//!
//! Every command produces one [`Table`]: a versioned schema name, fixed
//! columns, rows of typed cells, the resolved configuration, and free-form
//! metadata. CSV renders the schema/config/metadata as leading `#` comment
//! lines; JSON renders a single document. Numbers are written with Rust's
//! shortest round-trip formatting in both, so the two formats always carry
//! identical values.
//!
//! The echoed config deliberately contains only what determines the numbers:
//! command name, scientific parameters, dataset paths, and the seed. The
//! transport flags (`--format`, `--out`) and the worker count (`--threads`)
//! change where bytes go or how fast they are computed, never what they are,
//! and echoing the thread count would break the byte-identity guarantee
//! across `--threads` settings.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::Value;

use crate::error::CliError;

/// Output serialization picked by `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Comment-prefixed metadata, a header line, one line per row.
    Csv,
    /// One JSON document: `{schema, config, meta, rows}`.
    Json,
}

/// One table value. Numbers stay typed so CSV and JSON render identically.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// An exact count or index.
    Uint(u64),
    /// A real value; non-finite values render as the strings
    /// `inf`/`-inf`/`NaN` in both formats (JSON numbers cannot hold them).
    Float(f64),
    /// A short label, e.g. a source or section name.
    Text(&'static str),
    /// A column that does not apply to this row.
    Missing,
}

impl Cell {
    fn write_csv(&self, out: &mut String) {
        use std::fmt::Write as _;
        match self {
            Cell::Uint(v) => write!(out, "{v}").expect("writing to a String cannot fail"),
            Cell::Float(v) => write!(out, "{v}").expect("writing to a String cannot fail"),
            Cell::Text(v) => out.push_str(v),
            Cell::Missing => {}
        }
    }

    fn to_json(&self) -> Value {
        match *self {
            Cell::Uint(v) => Value::from(v),
            Cell::Float(v) => {
                if v.is_finite() {
                    Value::from(v)
                } else {
                    Value::String(format!("{v}"))
                }
            }
            Cell::Text(v) => Value::String(v.to_owned()),
            Cell::Missing => Value::Null,
        }
    }
}

/// A finished command result ready to serialize.
#[derive(Debug, Clone)]
pub struct Table {
    schema: &'static str,
    columns: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
    config: BTreeMap<String, Value>,
    meta: BTreeMap<String, Value>,
    warnings: Vec<String>,
}

impl Table {
    /// An empty table under a versioned schema with fixed columns.
    pub fn new(schema: &'static str, columns: &'static [&'static str]) -> Self {
        Table {
            schema,
            columns,
            rows: Vec::new(),
            config: BTreeMap::new(),
            meta: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    /// Appends one row; its length must match the column list.
    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match schema {}",
            self.schema
        );
        self.rows.push(row);
    }

    /// Records one resolved configuration entry (keys use flag spelling).
    pub fn set_config(&mut self, key: &str, value: impl Into<Value>) {
        self.config.insert(key.to_owned(), value.into());
    }

    /// Records one metadata entry (derived quantities, provenance).
    pub fn set_meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.insert(key.to_owned(), value.into());
    }

    /// Appends a data-quality warning.
    pub fn push_warning(&mut self, text: String) {
        self.warnings.push(text);
    }

    /// The schema identifier.
    pub fn schema(&self) -> &'static str {
        self.schema
    }

    /// Number of data rows.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Serializes the table to a string in the requested format.
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# schema: ");
        out.push_str(self.schema);
        out.push('\n');
        out.push_str("# config: ");
        out.push_str(
            &serde_json::to_string(&self.config).expect("config maps hold only JSON values"),
        );
        out.push('\n');
        for (key, value) in &self.meta {
            out.push_str("# ");
            out.push_str(key);
            out.push_str(": ");
            out.push_str(&serde_json::to_string(value).expect("meta holds only JSON values"));
            out.push('\n');
        }
        for warning in &self.warnings {
            out.push_str("# warning: ");
            out.push_str(warning);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.write_csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut object = serde_json::Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    object.insert((*name).to_owned(), cell.to_json());
                }
                Value::Object(object)
            })
            .collect();
        let mut meta = serde_json::Map::new();
        for (key, value) in &self.meta {
            meta.insert(key.clone(), value.clone());
        }
        if !self.warnings.is_empty() {
            meta.insert(
                "warnings".to_owned(),
                Value::from(self.warnings.clone()),
            );
        }
        let mut doc = serde_json::Map::new();
        doc.insert("schema".to_owned(), Value::from(self.schema));
        doc.insert(
            "config".to_owned(),
            Value::Object(self.config.clone().into_iter().collect()),
        );
        doc.insert("meta".to_owned(), Value::Object(meta));
        doc.insert("rows".to_owned(), Value::Array(rows));
        let mut text =
            serde_json::to_string_pretty(&Value::Object(doc)).expect("document is plain JSON");
        text.push('\n');
        text
    }

    /// Writes the table to `out`, or to stdout when no path is given.
    pub fn write(&self, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
        let text = self.render(format);
        match out {
            Some(path) => fs::write(path, text).map_err(|err| {
                CliError::data(format!("cannot write {}: {err}", path.display()))
            }),
            None => io::stdout()
                .write_all(text.as_bytes())
                .map_err(|err| CliError::data(format!("cannot write to stdout: {err}"))),
        }
    }
}
