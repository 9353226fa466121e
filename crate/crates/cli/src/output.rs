//! Writes tabular artifacts as CSV or as JSON arrays of row objects.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct OutDir {
    root: PathBuf,
    format: Format,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path, format: Format) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    /// Writes the table produced by `fill` (CSV with a header row) under
    /// `stem` in the selected format.
    pub fn table<F>(&mut self, stem: &str, fill: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> irw_core::Result<()>,
    {
        let mut bytes = Vec::new();
        fill(&mut bytes)?;
        match self.format {
            Format::Csv => self.write(&format!("{stem}.csv"), &bytes),
            Format::Json => {
                let rows = csv_to_json(&bytes)?;
                let mut text = serde_json::to_vec_pretty(&rows).map_err(irw_core::Error::from)?;
                text.push(b'\n');
                self.write(&format!("{stem}.json"), &text)
            }
        }
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_vec_pretty(value).map_err(irw_core::Error::from)?;
        text.push(b'\n');
        self.write(name, &text)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

/// Rows of a CSV table as JSON objects; fields that parse as numbers become
/// numbers.
fn csv_to_json(bytes: &[u8]) -> Result<Vec<serde_json::Map<String, serde_json::Value>>, CliError> {
    let mut reader = csv::Reader::from_reader(bytes);
    let headers = reader.headers().map_err(irw_core::Error::from)?.clone();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(irw_core::Error::from)?;
        let row = headers
            .iter()
            .zip(record.iter())
            .map(|(h, field)| {
                let value = if let Ok(i) = field.parse::<i64>() {
                    serde_json::Value::from(i)
                } else if let Some(x) = field.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                    serde_json::Value::Number(x)
                } else {
                    serde_json::Value::from(field)
                };
                (h.to_string(), value)
            })
            .collect();
        rows.push(row);
    }
    Ok(rows)
}
