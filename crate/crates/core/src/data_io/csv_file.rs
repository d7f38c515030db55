//! FRED-style CSV files.
//!
//! Series files have the header `DATE,<SERIES_ID>`, ISO dates on the first
//! of the month and `.` (or an empty field) for a missing value. Frame
//! files have `DATE` followed by one column per variable and no missing
//! values. Numbers are written in Rust's shortest round-trip form, so a
//! read/write cycle preserves every value bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::RawSeries;
use crate::error::{Error, Result};
use crate::frame::{Frame, Period};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.display().to_string()),
        _ => Error::Io(e),
    })
}

fn parse_err(source: &str, line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: source.to_string(),
        line,
        reason: reason.into(),
    }
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(r)
}

fn csv_err(source: &str, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    parse_err(source, line, e.to_string())
}

fn parse_date(source: &str, line: usize, s: &str) -> Result<Period> {
    s.parse::<Period>()
        .map_err(|_| parse_err(source, line, format!("invalid date `{s}`")))
}

fn parse_value(source: &str, line: usize, s: &str) -> Result<Option<f64>> {
    if s.is_empty() || s == "." {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(parse_err(source, line, format!("invalid value `{s}`"))),
    }
}

/// Reads a two-column series file. The series id is taken from the header.
pub fn read_series_csv(path: &Path) -> Result<RawSeries> {
    let source = path.display().to_string();
    let mut rdr = reader(open(path)?);
    let header = rdr.headers().map_err(|e| csv_err(&source, e))?.clone();
    if header.len() != 2 {
        return Err(parse_err(&source, 1, "expected header `DATE,<SERIES_ID>`"));
    }
    let id = header[1].to_string();
    let mut obs = Vec::new();
    let mut last: Option<Period> = None;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(&source, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != 2 {
            return Err(parse_err(&source, line, "expected two fields"));
        }
        let date = parse_date(&source, line, &rec[0])?;
        if last.is_some_and(|l| date <= l) {
            return Err(parse_err(&source, line, "dates not strictly increasing"));
        }
        last = Some(date);
        if let Some(v) = parse_value(&source, line, &rec[1])? {
            obs.push((date, v));
        }
    }
    Ok(RawSeries::new(id, obs))
}

pub fn write_series_csv(path: &Path, series: &RawSeries) -> Result<()> {
    let mut out = String::with_capacity(24 * series.observations.len() + 16);
    out.push_str(&format!("DATE,{}\n", series.id));
    for (p, v) in &series.observations {
        out.push_str(&format!("{p}-01,{v}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a frame file: `DATE,<name>,...`, consecutive months, no gaps.
pub fn read_frame_csv<R: Read>(r: R, source: &str) -> Result<Frame> {
    let mut rdr = reader(r);
    let header = rdr.headers().map_err(|e| csv_err(source, e))?.clone();
    if header.len() < 2 {
        return Err(parse_err(source, 1, "expected `DATE` and at least one variable"));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let k = names.len();
    let mut start = None;
    let mut values = Vec::new();
    let mut rows = 0usize;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(source, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != k + 1 {
            return Err(parse_err(source, line, format!("expected {} fields", k + 1)));
        }
        let date = parse_date(source, line, &rec[0])?;
        match start {
            None => start = Some(date),
            Some(s) if s.add_months(rows as i64) != date => {
                return Err(parse_err(source, line, format!("expected {}", s.add_months(rows as i64))));
            }
            _ => {}
        }
        for f in rec.iter().skip(1) {
            let v = parse_value(source, line, f)?
                .ok_or_else(|| parse_err(source, line, "missing value in frame"))?;
            values.push(v);
        }
        rows += 1;
    }
    let start = start.ok_or_else(|| parse_err(source, 2, "no data rows"))?;
    Frame::new(names, start, DMatrix::from_row_slice(rows, k, &values))
}

pub fn write_frame_csv<W: Write>(mut w: W, frame: &Frame) -> Result<()> {
    let mut out = String::from("DATE");
    for n in frame.names() {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    let data = frame.data();
    let mut p = frame.start();
    for i in 0..frame.nobs() {
        out.push_str(&format!("{p}-01"));
        for j in 0..frame.nvars() {
            out.push_str(&format!(",{}", data[(i, j)]));
        }
        out.push('\n');
        p = p.succ();
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("X.csv");
        std::fs::write(&path, "DATE,X\n1978-01-01,100.0\n1978-02-01,101.5\n").unwrap();
        let raw = read_series_csv(&path).unwrap();
        let s = raw.to_series("X", None).unwrap();
        assert_eq!(s.start(), Period::new(1978, 1).unwrap());
        assert_eq!(s.values(), &[100.0, 101.5]);
    }

    #[test]
    fn bad_value_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("X.csv");
        std::fs::write(&path, "DATE,X\n1978-01-01,1\n1978-02-01,2\n1978-03-01,abc\n").unwrap();
        match read_series_csv(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_markers_and_internal_gap() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("X.csv");
        std::fs::write(&path, "DATE,X\n1978-01-01,.\n1978-02-01,2\n1978-03-01,.\n1978-04-01,4\n1978-05-01,\n").unwrap();
        let raw = read_series_csv(&path).unwrap();
        assert_eq!(raw.observations.len(), 2);
        assert!(matches!(raw.to_series("X", None), Err(Error::InternalGap { .. })));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            read_series_csv(Path::new("/nonexistent/X.csv")),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn series_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("Y.csv");
        let vals = [0.1, 1.0 / 3.0, 1e-300, 123456789.12345679, -2.5e17];
        let obs = vals
            .iter()
            .enumerate()
            .map(|(i, &v)| (Period::new(2000, 1).unwrap().add_months(i as i64), v))
            .collect();
        let raw = RawSeries::new("Y", obs);
        write_series_csv(&path, &raw).unwrap();
        let back = read_series_csv(&path).unwrap();
        assert_eq!(back, raw);
    }

    #[test]
    fn frame_round_trip() {
        let data = DMatrix::from_row_slice(3, 2, &[1.0, 0.5, 2.0, 1.0 / 7.0, 3.0, -4.0]);
        let f = Frame::new(vec!["a".into(), "b".into()], Period::new(1999, 11).unwrap(), data).unwrap();
        let mut buf = Vec::new();
        write_frame_csv(&mut buf, &f).unwrap();
        let back = read_frame_csv(buf.as_slice(), "mem").unwrap();
        assert_eq!(back, f);
    }
}
