//! Plain-text formats used by the command-line tool.
//!
//! Paths are CSV with a `t` column followed by one column per path. Covariogram tables
//! are `delta,value` CSV. Coefficients are JSON (see [`CoefficientFile`]).

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::coefficients::{CoefficientFile, SpectralCoefficients};
use crate::covariogram::SampledCovariogram;
use crate::error::{Error, Result};
use crate::grid::GridPath;

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

fn parse_field(field: &str, row: usize, col: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Format(format!("row {row}, column {col}: `{field}` is not a number")))
}

/// Reads a numeric CSV with a header row into columns.
fn read_columns<R: Read>(reader: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(str::to_owned).collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(Error::Format("missing header row".into()));
    }
    let mut cols = vec![Vec::new(); header.len()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        for (c, field) in rec.iter().enumerate() {
            let v = parse_field(field, i + 1, c)?;
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            cols[c].push(v);
        }
    }
    Ok((header, cols))
}

/// Writes paths as `t,x` (one path) or `t,x0,x1,…`.
pub fn write_paths<W: Write>(w: W, paths: &[GridPath]) -> Result<()> {
    let names: Vec<String> = if paths.len() == 1 {
        vec!["x".into()]
    } else {
        (0..paths.len()).map(|i| format!("x{i}")).collect()
    };
    write_named_columns(w, &names, paths)
}

/// Writes named columns sharing the grid `t = j/n`.
pub fn write_named_columns<W: Write>(w: W, names: &[String], paths: &[GridPath]) -> Result<()> {
    if names.len() != paths.len() {
        return Err(Error::InvalidArgument("one name per column is required".into()));
    }
    let Some(first) = paths.first() else {
        return Err(Error::EmptyEnsemble);
    };
    let n = first.n();
    if paths.iter().any(|p| p.n() != n) {
        return Err(Error::InvalidArgument("paths must share one grid".into()));
    }
    let mut w = BufWriter::new(w);
    writeln!(w, "t,{}", names.join(","))?;
    for j in 0..n {
        write!(w, "{:.16e}", j as f64 / n as f64)?;
        for p in paths {
            write!(w, ",{:.16e}", p.values()[j])?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads paths from CSV. A leading `t` column is skipped; every other column is a path.
pub fn read_paths<R: Read>(r: R) -> Result<Vec<GridPath>> {
    let (header, mut cols) = read_columns(r)?;
    if header[0].eq_ignore_ascii_case("t") {
        cols.remove(0);
    }
    if cols.is_empty() {
        return Err(Error::Format("no path columns".into()));
    }
    cols.into_iter().map(GridPath::new).collect()
}

/// Writes a covariogram table on `δ = j/n`.
pub fn write_covariogram<W: Write>(w: W, values: &[f64]) -> Result<()> {
    let n = values.len();
    let mut w = BufWriter::new(w);
    writeln!(w, "delta,value")?;
    for (j, v) in values.iter().enumerate() {
        writeln!(w, "{:.16e},{:.16e}", j as f64 / n as f64, v)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a covariogram table. With two columns the second holds the values and the
/// first must be the grid `j/n`; a single column holds values only.
pub fn read_covariogram<R: Read>(r: R) -> Result<SampledCovariogram> {
    let (_, cols) = read_columns(r)?;
    let values = match cols.len() {
        1 => cols.into_iter().next().unwrap_or_default(),
        2 => {
            let n = cols[0].len();
            if let Some(j) = (0..n).find(|&j| (cols[0][j] - j as f64 / n as f64).abs() > 1e-9) {
                return Err(Error::Format(format!("row {}: delta {} is not {j}/{n}", j + 1, cols[0][j])));
            }
            cols.into_iter().nth(1).unwrap_or_default()
        }
        c => return Err(Error::Format(format!("expected 1 or 2 columns, found {c}"))),
    };
    SampledCovariogram::new(values)
}

pub fn read_coefficients<R: Read>(r: R) -> Result<SpectralCoefficients> {
    let f: CoefficientFile = serde_json::from_reader(r)?;
    SpectralCoefficients::try_from(f)
}

pub fn write_coefficients<W: Write>(w: W, c: &SpectralCoefficients) -> Result<()> {
    write_json(w, &c.to_file())
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(w: W, value: &T) -> Result<()> {
    let mut w = BufWriter::new(w);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Sidecar written next to simulated data.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunMetadata {
    pub command: String,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub replicates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Fraction of the variance beyond `k` (relative to `‖c‖²`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<serde_json::Value>,
    pub version: String,
}
