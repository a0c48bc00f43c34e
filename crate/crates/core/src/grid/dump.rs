//! `mcnd-grid v1` dumps: ASCII header, then little-endian f64 node values in
//! row-major order (last axis fastest).
//!
//! ```text
//! mcnd-grid v1
//! n 2
//! shape 101 101
//! origin -2 -2
//! h 0.04
//! DATA
//! <8 * 101 * 101 bytes>
//! ```
//!
//! Meridian grids carry one extra header line, `axisymmetric 1`, before `DATA`;
//! their `shape` and `origin` list the two stored axes.

use super::{GridSpec, ScalarField};
use crate::error::{Error, Result};
use std::io::{BufRead, Write};

const MAGIC: &str = "mcnd-grid v1";

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_dump<W: Write>(field: &ScalarField, mut out: W) -> Result<()> {
    let spec = field.spec();
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "n {}", spec.n())?;
    writeln!(out, "shape {}", join(spec.shape()))?;
    writeln!(out, "origin {}", join(spec.origin()))?;
    writeln!(out, "h {}", spec.h())?;
    if spec.is_axisymmetric() {
        writeln!(out, "axisymmetric 1")?;
    }
    writeln!(out, "DATA")?;
    let mut buf = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

fn header_line<R: BufRead>(input: &mut R, key: &str) -> Result<Vec<String>> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let mut parts = line.trim_end_matches('\n').split(' ');
    match parts.next() {
        Some(k) if k == key => Ok(parts.map(str::to_string).collect()),
        _ => Err(Error::Dump(format!("expected `{key}` line, got {line:?}"))),
    }
}

fn parse_all<T: std::str::FromStr>(xs: &[String], what: &str) -> Result<Vec<T>> {
    xs.iter()
        .map(|x| {
            x.parse()
                .map_err(|_| Error::Dump(format!("bad {what} value {x:?}")))
        })
        .collect()
}

pub fn read_dump<R: BufRead>(mut input: R) -> Result<ScalarField> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    if line.trim_end_matches('\n') != MAGIC {
        return Err(Error::Dump(format!("bad magic line {line:?}")));
    }
    let n: Vec<usize> = parse_all(&header_line(&mut input, "n")?, "n")?;
    let shape: Vec<usize> = parse_all(&header_line(&mut input, "shape")?, "shape")?;
    let origin: Vec<f64> = parse_all(&header_line(&mut input, "origin")?, "origin")?;
    let h: Vec<f64> = parse_all(&header_line(&mut input, "h")?, "h")?;
    if n.len() != 1 || h.len() != 1 {
        return Err(Error::Dump("`n` and `h` take one value".into()));
    }
    line.clear();
    input.read_line(&mut line)?;
    let axisymmetric = match line.trim_end_matches('\n') {
        "DATA" => false,
        "axisymmetric 1" => {
            line.clear();
            input.read_line(&mut line)?;
            if line.trim_end_matches('\n') != "DATA" {
                return Err(Error::Dump("missing DATA line".into()));
            }
            true
        }
        other => return Err(Error::Dump(format!("unexpected header line {other:?}"))),
    };
    let spec = if axisymmetric {
        if n[0] != 3 || shape.len() != 2 || origin.len() != 2 {
            return Err(Error::Dump("axisymmetric dump must be n 3 with two axes".into()));
        }
        GridSpec::axisymmetric([shape[0], shape[1]], [origin[0], origin[1]], h[0])?
    } else {
        if shape.len() != n[0] {
            return Err(Error::Dump(format!("n {} but {} shape entries", n[0], shape.len())));
        }
        GridSpec::new(&shape, &origin, h[0])?
    };
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * spec.len() {
        return Err(Error::Dump(format!(
            "expected {} data bytes, found {}",
            8 * spec.len(),
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScalarField::new(spec, values).map_err(|e| Error::Dump(e.to_string()))
}
