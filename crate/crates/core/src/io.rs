//! CSV and JSON emitters. Numbers are written with 17 significant digits so
//! every double survives a round trip.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::driver::ScanResult;
use crate::error::{Error, Result};
use crate::limit::ThresholdRow;
use crate::radial::{RadialField, RadialGrid};

pub const FIELD_HEADER: [&str; 4] = ["r", "u", "H", "Tail"];
pub const SCAN_HEADER: [&str; 3] = ["rho", "phi", "model_phi"];
pub const THRESHOLD_HEADER: [&str; 4] = ["p", "m", "omega0", "omega1"];

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_error(path: &str, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.to_string(),
        message: e.to_string(),
    }
}

/// Header plus one row per entry of `rows`.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer
        .write_record(header)
        .map_err(|e| io_error("<csv>", e))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Field(format!(
                "row has {} columns, header has {}",
                row.len(),
                header.len()
            )));
        }
        writer
            .write_record(row.iter().map(|&x| format_number(x)))
            .map_err(|e| io_error("<csv>", e))?;
    }
    writer.flush().map_err(|e| io_error("<csv>", e))
}

/// Reads a numeric CSV with exactly the given header.
pub fn read_csv<R: Read>(input: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(input);
    let found = reader.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Parse(format!(
            "expected header {:?}, found {:?}",
            header,
            found.iter().collect::<Vec<_>>()
        )));
    }
    reader
        .records()
        .enumerate()
        .map(|(line, record)| {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            record
                .iter()
                .map(|cell| {
                    cell.trim().parse::<f64>().map_err(|_| {
                        Error::Parse(format!("row {}: {cell:?} is not a number", line + 1))
                    })
                })
                .collect()
        })
        .collect()
}

pub fn field_rows(field: &RadialField) -> Vec<Vec<f64>> {
    let grid = field.grid();
    (0..=grid.n + 1)
        .map(|i| vec![grid.r(i), field.value(i), field.gauge()[i], field.tail()[i]])
        .collect()
}

pub fn write_field_csv<W: Write>(out: W, field: &RadialField) -> Result<()> {
    write_csv(out, &FIELD_HEADER, &field_rows(field))
}

/// Rebuilds a field from its CSV; the radius and node count come from the `r` column.
pub fn read_field_csv<R: Read>(input: R) -> Result<RadialField> {
    let rows = read_csv(input, &FIELD_HEADER)?;
    let radius = rows
        .last()
        .map(|row| row[0])
        .ok_or_else(|| Error::Parse("empty field file".into()))?;
    let grid = RadialGrid::new(radius, rows.len().saturating_sub(2))?;
    for (i, row) in rows.iter().enumerate() {
        if row[0] != grid.r(i) {
            return Err(Error::Parse(format!(
                "row {}: r = {} is not on the uniform grid (expected {})",
                i + 1,
                row[0],
                grid.r(i)
            )));
        }
    }
    RadialField::from_all_nodes(grid, rows.iter().map(|row| row[1]).collect())
}

pub fn scan_rows(scan: &ScanResult) -> Vec<Vec<f64>> {
    scan.rho_grid
        .iter()
        .zip(&scan.phi)
        .zip(&scan.model_phi)
        .map(|((&r, &p), &m)| vec![r, p, m])
        .collect()
}

pub fn write_scan_csv<W: Write>(out: W, scan: &ScanResult) -> Result<()> {
    write_csv(out, &SCAN_HEADER, &scan_rows(scan))
}

pub fn write_thresholds_csv<W: Write>(out: W, rows: &[ThresholdRow]) -> Result<()> {
    let rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|t| vec![t.p, t.m, t.omega0, t.omega1])
        .collect();
    write_csv(out, &THRESHOLD_HEADER, &rows)
}

/// Pretty JSON with a trailing newline; keys follow the struct field order.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `contents` to `path`, with the path in any error.
pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    let shown = path.display().to_string();
    let mut file = File::create(path).map_err(|e| io_error(&shown, e))?;
    file.write_all(contents).map_err(|e| io_error(&shown, e))
}

pub fn open_file(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| io_error(&path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn number_format_round_trips() {
        for x in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            0.0,
        ] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn header_and_line_endings() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["a", "b"], &[vec![1.0, 2.0]]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "a,b\n1.0000000000000000e0,2.0000000000000000e0\n");
        assert!(write_csv(Vec::new(), &["a"], &[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn wrong_header_is_rejected() {
        let text = "x,u,H,Tail\n0,0,0,0\n";
        assert!(read_field_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn off_grid_radius_is_rejected() {
        let grid = RadialGrid::new(2.0, 20).unwrap();
        let field = RadialField::from_fn(grid, |r| (2.0 - r) * r).unwrap();
        let mut rows = field_rows(&field);
        rows[3][0] = f64::from_bits(rows[3][0].to_bits() + 1);
        let mut buf = Vec::new();
        write_csv(&mut buf, &FIELD_HEADER, &rows).unwrap();
        assert!(read_field_csv(buf.as_slice()).is_err());
    }

    proptest! {
        #[test]
        fn field_csv_round_trip(
            radius in 1.0f64..200.0,
            n in 16usize..200,
            seed in proptest::collection::vec(-10.0f64..10.0, 8),
        ) {
            let grid = RadialGrid::new(radius, n).unwrap();
            let field = RadialField::from_fn(grid, |r| {
                seed.iter().enumerate().map(|(j, c)| c * (j as f64 * r / radius).sin()).sum::<f64>()
            }).unwrap();
            let mut buf = Vec::new();
            write_field_csv(&mut buf, &field).unwrap();
            let back = read_field_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.grid(), field.grid());
            prop_assert_eq!(back.values(), field.values());
            prop_assert_eq!(back.gauge(), field.gauge());
            prop_assert_eq!(back.tail(), field.tail());
        }
    }
}
