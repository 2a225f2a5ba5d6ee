use std::io::Write;

use advncg::rational::{format_decimal, format_exact};
use advncg::{ExtCost, Rational};
use clap::ValueEnum;

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    /// One JSON object per row.
    Json,
}

/// Rows of string cells under a fixed header.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: impl Write) -> Result<(), Failure> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
            Format::Json => {
                let mut out = out;
                for row in &self.rows {
                    let obj: serde_json::Map<String, serde_json::Value> = self
                        .header
                        .iter()
                        .cloned()
                        .zip(row.iter().map(|c| serde_json::Value::String(c.clone())))
                        .collect();
                    serde_json::to_writer(&mut out, &obj)?;
                    writeln!(out)?;
                }
            }
        }
        Ok(())
    }
}

/// `name` and `name-decimal` column titles.
pub fn pair_header(name: &str) -> [String; 2] {
    [name.to_string(), format!("{name}-decimal")]
}

pub fn rat(r: &Rational) -> [String; 2] {
    [format_exact(r), format_decimal(r)]
}

pub fn cost(c: &ExtCost) -> [String; 2] {
    [c.exact(), c.decimal()]
}

pub fn opt_cost(c: Option<&ExtCost>) -> [String; 2] {
    c.map(cost).unwrap_or_default()
}

pub fn opt_rat(r: Option<&Rational>) -> [String; 2] {
    r.map(rat).unwrap_or_default()
}

pub fn list(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}
