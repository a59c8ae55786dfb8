//! Result files. CSVs open with `# schema=1`, then `#` comment lines holding
//! everything needed to reproduce the run, then a header row.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const SCHEMA: u32 = 1;

/// Float with 9 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.8e}")
    }
}

/// Destination for a result document: a file, or stdout when no path is given.
pub fn open(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::Config(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("write failed: {e}"))
}

pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => fmt_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Int(b as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Writes the schema line, `meta` as `# key=value` comments, then the table.
    pub fn write(&self, out: &mut dyn Write, meta: &[(&str, String)]) -> Result<()> {
        writeln!(out, "# schema={SCHEMA}").map_err(io_err)?;
        for (k, v) in meta {
            // keep each entry on one comment line
            writeln!(out, "# {k}={}", v.replace('\n', " ")).map_err(io_err)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(io_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }
}

/// Parses a CSV written by [`CsvTable::write`] back into metadata, header and rows.
pub fn read_csv(text: &str) -> Result<(Vec<(String, String)>, Vec<String>, Vec<Vec<String>>)> {
    let mut meta = Vec::new();
    let mut body = String::new();
    let mut lines = text.lines();
    match lines.next() {
        Some(l) if l == format!("# schema={SCHEMA}") => {}
        other => return Err(Error::Config(format!("unexpected schema line {other:?}"))),
    }
    for line in lines {
        if let Some(c) = line.strip_prefix("# ") {
            let (k, v) = c.split_once('=').unwrap_or((c, ""));
            meta.push((k.to_string(), v.to_string()));
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers().map_err(io_err)?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(String::from).collect()).map_err(io_err))
        .collect::<Result<_>>()?;
    Ok((meta, header, rows))
}
