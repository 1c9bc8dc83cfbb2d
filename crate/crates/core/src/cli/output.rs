use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::error::{GoebelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Plain,
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Plain => "plain",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Header plus rows of already-rendered fields.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: ToString>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(|s| s.to_string()).collect());
    }
}

/// One command's result in all three renderings.
#[derive(Debug, Clone)]
pub struct Document {
    pub plain: String,
    pub table: Table,
    pub json: Value,
    /// Exact CSV bytes, when the result has a canonical CSV form of its own.
    pub raw_csv: Option<String>,
}

impl Document {
    pub fn new(plain: impl Into<String>, table: Table, json: impl Serialize) -> Result<Self> {
        Ok(Document {
            plain: plain.into(),
            table,
            json: serde_json::to_value(json).map_err(|e| GoebelError::Io(e.to_string()))?,
            raw_csv: None,
        })
    }

    pub fn with_raw_csv(mut self, csv: String) -> Self {
        self.raw_csv = Some(csv);
        self
    }
}

fn write_csv(table: &Table) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| GoebelError::Io(e.to_string());
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row).map_err(io)?;
    }
    w.into_inner().map_err(|e| GoebelError::Io(e.to_string()))
}

/// Serializes deterministically; the same document always gives the same
/// bytes.
pub fn format_output(doc: &Document, fmt: OutputFormat) -> Result<Vec<u8>> {
    match fmt {
        OutputFormat::Plain => {
            let mut s = doc.plain.clone();
            if !s.ends_with('\n') {
                s.push('\n');
            }
            Ok(s.into_bytes())
        }
        OutputFormat::Csv => match &doc.raw_csv {
            Some(raw) => Ok(raw.clone().into_bytes()),
            None => write_csv(&doc.table),
        },
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&doc.json).map_err(|e| GoebelError::Io(e.to_string()))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
    }
}
