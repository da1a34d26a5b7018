//! Plain-text matrix format used by 4ti2: a header line `R C` followed by
//! `R·C` whitespace-separated integers in row-major order.
//!
//! The writer emits one row per line with single spaces, so
//! `format(parse(format(m))) == format(m)` byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::LatticeInt;

/// A row-major table that may have zero rows (an empty move set is `0 d`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: LatticeInt> Table<T> {
    pub fn from_rows(cols: usize, rows: &[Vec<T>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Dimension { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Table { rows: rows.len(), cols, data })
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

pub fn parse<T: LatticeInt>(text: &str) -> Result<Table<T>> {
    let mut tokens = text.split_whitespace();
    let mut header = |what: &str| -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what} in header")))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad {what} in header: {e}")))
    };
    let rows = header("row count")?;
    let cols = header("column count")?;
    let expected = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Parse("header dimensions overflow".into()))?;
    let mut data = Vec::with_capacity(expected);
    for (k, tok) in tokens.enumerate() {
        if k >= expected {
            return Err(Error::Parse(format!(
                "trailing data: expected {expected} entries for a {rows}x{cols} matrix"
            )));
        }
        let v = tok.parse::<T>().map_err(|_| {
            Error::Parse(format!("entry {} (row {}) is not an integer: {tok:?}", k, k / cols.max(1) + 1))
        })?;
        data.push(v);
    }
    if data.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} entries for a {rows}x{cols} matrix, found {}",
            data.len()
        )));
    }
    Ok(Table { rows, cols, data })
}

pub fn format<T: LatticeInt>(table: &Table<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", table.rows, table.cols);
    for i in 0..table.rows {
        let row = table.row(i);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn read<T: LatticeInt>(path: impl AsRef<Path>) -> Result<Table<T>> {
    parse(&std::fs::read_to_string(path)?)
}

pub fn write<T: LatticeInt>(path: impl AsRef<Path>, table: &Table<T>) -> Result<()> {
    std::fs::write(path, format(table))?;
    Ok(())
}

/// Reads a `1 n` (or `n 1`) table as a vector.
pub fn parse_vector<T: LatticeInt>(text: &str) -> Result<Vec<T>> {
    let t = parse::<T>(text)?;
    if t.rows != 1 && t.cols != 1 {
        return Err(Error::Parse(format!("expected a vector, found a {}x{} matrix", t.rows, t.cols)));
    }
    Ok(t.data)
}

pub fn format_vector<T: LatticeInt>(v: &[T]) -> String {
    format(&Table { rows: 1, cols: v.len(), data: v.to_vec() })
}
