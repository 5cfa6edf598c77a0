//! Table, JSON and CSV writers.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Rows of string cells under a header, shared by the table and CSV writers.
pub struct Rows {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Rows {
    pub fn new(header: Vec<&'static str>) -> Self {
        Rows {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write_table(&self, out: &mut dyn Write) -> io::Result<()> {
        let mut width: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: Vec<&str>| -> String {
            let padded: Vec<String> = cells
                .iter()
                .zip(&width)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        writeln!(out, "{}", line(self.header.clone()))?;
        let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
        writeln!(out, "{}", rule.join("  "))?;
        for r in &self.rows {
            writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Float cell: 17 significant digits in machine formats, 10 decimals in tables.
pub fn num(x: f64, format: Format) -> String {
    match format {
        Format::Table => format!("{x:.10}"),
        _ => format!("{x:.16e}"),
    }
}

pub fn sci(x: f64, format: Format) -> String {
    match format {
        Format::Table => format!("{x:.3e}"),
        _ => format!("{x:.16e}"),
    }
}

pub fn vector(v: &[f64], format: Format) -> String {
    let parts: Vec<String> = v.iter().map(|&x| num(x, format)).collect();
    match format {
        Format::Table => format!("({})", parts.join(", ")),
        _ => parts.join(" "),
    }
}

/// Writes `rows` as a table or CSV, or `value` as JSON.
pub fn emit<S: Serialize>(
    format: Format,
    path: Option<&Path>,
    rows: &Rows,
    value: &S,
) -> Result<()> {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => {
            Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Table => rows.write_table(&mut sink)?,
        Format::Csv => rows.write_csv(&mut sink)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, value)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}
