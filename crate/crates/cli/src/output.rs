use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use funklib::GridFunction;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::error::CliResult;
use crate::input::GridFile;

/// Seventeen significant digits, so every value round-trips.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json(path: Option<&Path>, value: &impl Serialize) -> CliResult<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// A table as CSV (the default) or as a JSON array of row objects.
pub fn write_table(cfg: &RunConfig, header: &[&str], rows: &[Vec<Value>]) -> CliResult<()> {
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(cell).collect()).collect();
            write_csv(cfg.out.as_deref(), header, &text)
        }
        Format::Json => {
            let objects: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(header.iter().map(|h| h.to_string()).zip(r.iter().cloned()).collect()))
                .collect();
            write_json(cfg.out.as_deref(), &objects)
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().expect("f64 number")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// A grid function as a [`GridFile`] (JSON) or as `x,y,z,value` rows (CSV).
pub fn write_grid_function(cfg: &RunConfig, f: &GridFunction, metadata: serde_json::Value) -> CliResult<()> {
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(cfg.out.as_deref(), &GridFile::from_grid_function(f, metadata)),
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                f.grid.nodes.iter().zip(&f.values).map(|(p, v)| vec![num(p.x), num(p.y), num(p.z), num(*v)]).collect();
            write_csv(cfg.out.as_deref(), &["x", "y", "z", "value"], &rows)
        }
    }
}
