//! Time-series CSV output: 12 significant digits, LF line endings.

use crate::error::Result;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub const HEADER: &str =
    "t,volume,perimeter,dirichlet,penalty,total_energy,sym_diff_prev,min_dist_din,flags";

/// One sample of a smooth or flat run.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub t: f64,
    pub volume: f64,
    pub perimeter: f64,
    pub dirichlet: f64,
    pub penalty: f64,
    pub total_energy: f64,
    pub sym_diff_prev: f64,
    pub min_dist_din: f64,
    /// Semicolon-separated markers such as `clamped` or `nonstationary`.
    pub flags: String,
}

/// `x` with 12 significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn write_rows<W: Write>(rows: &[Row], mut out: W) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in rows {
        let nums = [
            r.t,
            r.volume,
            r.perimeter,
            r.dirichlet,
            r.penalty,
            r.total_energy,
            r.sym_diff_prev,
            r.min_dist_din,
        ];
        for x in nums {
            write!(out, "{},", fmt_num(x))?;
        }
        writeln!(out, "{}", r.flags)?;
    }
    out.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[Row], path: &Path) -> Result<()> {
    write_rows(rows, BufWriter::new(File::create(path)?))
}

/// A purely numeric table under an arbitrary header.
pub fn emit_table(header: &[&str], rows: &[Vec<f64>], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&x| fmt_num(x)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> Row {
        Row {
            t: 0.5,
            volume: std::f64::consts::PI,
            perimeter: 1e-20,
            dirichlet: -2.0,
            penalty: 0.0,
            total_energy: 12345.678901234567,
            sym_diff_prev: 0.0,
            min_dist_din: 1.0,
            flags: "clamped".into(),
        }
    }

    #[test]
    fn zero_rows_is_header_only() {
        let mut buf = Vec::new();
        write_rows(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{HEADER}\n"));
    }

    #[test]
    fn numbers_keep_twelve_significant_digits() {
        assert_eq!(fmt_num(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(fmt_num(-0.000123), "-1.23000000000e-4");
        assert_eq!(fmt_num(f64::NAN), "nan");
        let mut buf = Vec::new();
        write_rows(&[row()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        let line = text.lines().nth(1).unwrap();
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), HEADER.split(',').count());
        assert_eq!(cells[5], "1.23456789012e4");
        assert_eq!(cells[8], "clamped");
        let back: f64 = cells[1].parse().unwrap();
        assert!((back - std::f64::consts::PI).abs() < 1e-11);
    }
}
