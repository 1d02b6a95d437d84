//! Deterministic CSV output: comma separated, LF line endings, every number
//! written with 17 significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::integrate::Trajectory;
use crate::multiscale::ObservableSeries;

/// Something that can be written as one CSV document.
pub trait CsvExport {
    fn write_csv(&self, w: &mut dyn Write) -> io::Result<()>;

    fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_row(w: &mut dyn Write, fields: impl IntoIterator<Item = String>) -> io::Result<()> {
    let line = fields.into_iter().collect::<Vec<_>>().join(",");
    w.write_all(line.as_bytes())?;
    w.write_all(b"\n")
}

/// `time,U_1,...,U_N`.
impl CsvExport for Trajectory {
    fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        let n = self.states.first().map_or(self.final_state.len(), |s| s.len());
        write_row(w, std::iter::once("time".to_string()).chain((1..=n).map(|k| format!("U_{k}"))))?;
        for (t, s) in self.times.iter().zip(&self.states) {
            write_row(w, std::iter::once(num(*t)).chain(s.as_slice().iter().map(|x| num(*x))))?;
        }
        Ok(())
    }
}

fn series_header(m: usize) -> impl Iterator<Item = String> {
    std::iter::once("time".to_string())
        .chain((1..=m).map(|j| format!("v_{j}")))
        .chain(std::iter::once("method".to_string()))
}

fn series_rows(s: &ObservableSeries, w: &mut dyn Write) -> io::Result<()> {
    for (t, v) in s.times.iter().zip(&s.values) {
        write_row(
            w,
            std::iter::once(num(*t))
                .chain(v.as_slice().iter().map(|x| num(*x)))
                .chain(std::iter::once(s.method.tag().to_string())),
        )?;
    }
    Ok(())
}

/// `time,v_1,...,v_{N/2+1},method`. An empty series has no observable
/// columns to name, so its header is `time,method`.
impl CsvExport for ObservableSeries {
    fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        let m = self.values.first().map_or(0, |v| v.len());
        write_row(w, series_header(m))?;
        series_rows(self, w)
    }
}

/// Several series under one header, told apart by the method column.
impl CsvExport for [ObservableSeries] {
    fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        let m = self
            .iter()
            .find_map(|s| s.values.first())
            .map_or(0, |v| v.len());
        write_row(w, series_header(m))?;
        for s in self {
            series_rows(s, w)?;
        }
        Ok(())
    }
}

/// Free-form numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

impl CsvExport for CsvTable {
    fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        write_row(w, self.header.iter().cloned())?;
        for r in &self.rows {
            write_row(w, r.iter().map(|x| num(*x)))?;
        }
        Ok(())
    }
}

/// Writes `item` to `path`, creating or truncating the file.
pub fn export_csv<T: CsvExport + ?Sized>(item: &T, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    item.write_csv(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}
