//! Self-describing tabular output.
//!
//! CSV layout:
//!
//! ```text
//! # dicke-lab <command>
//! # key = value          (run metadata, sorted by key)
//! # [summary]
//! # key = value          (derived results, sorted by key)
//! col_a,col_b,...
//! ...
//! ```
//!
//! JSON carries the same fields as one object. Numbers are written in the
//! shortest form that parses back to the same `f64`, so a parsed document
//! re-emits byte for byte.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

const MAGIC: &str = "# dicke-lab ";
const SUMMARY: &str = "# [summary]";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            Cell::Num(_) => None,
        }
    }

    fn parse(s: &str) -> Cell {
        match s.parse::<f64>() {
            Ok(x) => Cell::Num(x),
            Err(_) => Cell::Text(s.to_string()),
        }
    }
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

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Debug gives the shortest round-trip form, with exponents for
            // very large or small magnitudes.
            Cell::Num(x) => write!(f, "{x:?}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// Formats a float the same way table cells are formatted.
pub fn num(x: f64) -> String {
    Cell::Num(x).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub command: String,
    pub metadata: BTreeMap<String, String>,
    pub summary: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("version".to_string(), env!("CARGO_PKG_VERSION").to_string());
        Self {
            command: command.to_string(),
            metadata,
            summary: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn meta_num(&mut self, key: &str, value: f64) -> &mut Self {
        self.meta(key, num(value))
    }

    pub fn summarize(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.summary.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                out.write_all(b"\n")?;
                Ok(())
            }
        }
    }

    pub fn to_bytes(&self, format: Format) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        Ok(buf)
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "{MAGIC}{}", self.command)?;
        for (k, v) in &self.metadata {
            writeln!(out, "# {k} = {v}")?;
        }
        if !self.summary.is_empty() {
            writeln!(out, "{SUMMARY}")?;
            for (k, v) in &self.summary {
                writeln!(out, "# {k} = {v}")?;
            }
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn parse(format: Format, bytes: &[u8]) -> Result<Self> {
        match format {
            Format::Json => Ok(serde_json::from_slice(bytes)?),
            Format::Csv => Self::parse_csv(bytes),
        }
    }

    fn parse_csv(bytes: &[u8]) -> Result<Self> {
        let mut lines = bytes.lines();
        let first = lines.next().context("empty document")??;
        let command = first
            .strip_prefix(MAGIC)
            .context("missing document header line")?
            .to_string();
        let mut metadata = BTreeMap::new();
        let mut summary = BTreeMap::new();
        let mut in_summary = false;
        let mut header_offset = first.len() + 1;
        for line in lines {
            let line = line?;
            if !line.starts_with('#') {
                break;
            }
            header_offset += line.len() + 1;
            if line == SUMMARY {
                in_summary = true;
                continue;
            }
            let body = &line[1..];
            let (k, v) = body
                .split_once(" = ")
                .with_context(|| format!("malformed metadata line: {line}"))?;
            let target = if in_summary { &mut summary } else { &mut metadata };
            target.insert(k.trim().to_string(), v.to_string());
        }
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(&bytes[header_offset..]);
        let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            if rec.len() != columns.len() {
                bail!("row has {} fields, header has {}", rec.len(), columns.len());
            }
            rows.push(rec.iter().map(Cell::parse).collect());
        }
        Ok(Self {
            command,
            metadata,
            summary,
            columns,
            rows,
        })
    }
}
