//! JSON envelope and CSV writing.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::args::{Format, OutputArgs};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub paper_reference: Option<Value>,
    pub timing: Timing,
}

impl Report {
    pub fn new<C: Serialize, R: Serialize>(
        command: &'static str,
        config: &C,
        result: &R,
        started: Instant,
    ) -> CliResult<Self> {
        Ok(Self {
            command,
            config: to_value(config)?,
            result: to_value(result)?,
            paper_reference: None,
            timing: Timing { wall_seconds: started.elapsed().as_secs_f64() },
        })
    }

    pub fn with_reference(mut self, reference: Option<Value>) -> Self {
        self.paper_reference = reference;
        self
    }
}

pub fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::config(format!("serialization: {e}")))
}

fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(io::BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| CliError::io(format!("{}: {e}", p.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

pub fn write_json(report: &Report, out: &OutputArgs) -> CliResult<()> {
    let mut w = sink(out.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, report).map_err(|e| CliError::io(e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(e.to_string()))
}

/// Writes a header and numeric rows as RFC 4180 CSV.
pub fn write_csv(header: &[String], rows: &[Vec<f64>], out: &OutputArgs) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(out.out.as_deref())?);
    let err = |e: csv::Error| CliError::io(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row.iter().copied().map(format_real)).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(e.to_string()))
}

pub fn format_or(out: &OutputArgs, default: Format) -> Format {
    out.format.unwrap_or(default)
}

/// Shortest round-trip text, switching to exponent form for very small or
/// large magnitudes.
pub fn format_real(x: f64) -> String {
    let m = x.abs();
    if m == 0.0 || (1e-4..1e15).contains(&m) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
