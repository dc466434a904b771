//! Matrix files.
//!
//! `JSM1` binary layout, all little-endian:
//!
//! | offset | size | content                       |
//! |--------|------|-------------------------------|
//! | 0      | 4    | magic `4A 53 4D 31` (`JSM1`)  |
//! | 4      | 8    | rows, `u64`                   |
//! | 12     | 8    | cols, `u64`                   |
//! | 20     | 8·rows·cols | entries, binary64, row-major |
//!
//! The CSV form is one matrix row per line, comma-separated.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::Matrix;

pub const JSM_MAGIC: [u8; 4] = *b"JSM1";
const HEADER_LEN: usize = 20;

pub fn write_jsm<W: Write>(mut w: W, m: &Matrix) -> Result<()> {
    w.write_all(&JSM_MAGIC)?;
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&(m.cols() as u64).to_le_bytes())?;
    for v in m.as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsm<R: Read>(mut r: R) -> Result<Matrix> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if header[..4] != JSM_MAGIC {
        return Err(Error::Format(format!("bad magic {:02x?}", &header[..4])));
    }
    let rows = u64::from_le_bytes(header[4..12].try_into().unwrap());
    let cols = u64::from_le_bytes(header[12..20].try_into().unwrap());
    let count = rows
        .checked_mul(cols)
        .and_then(|c| usize::try_from(c).ok())
        .ok_or_else(|| Error::Format(format!("{rows}x{cols} is too large")))?;
    let mut data = Vec::with_capacity(count.min(1 << 24));
    let mut buf = [0u8; 8];
    for _ in 0..count {
        r.read_exact(&mut buf)
            .map_err(|_| Error::Format(format!("payload shorter than {rows}x{cols} entries")))?;
        data.push(f64::from_le_bytes(buf));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    Matrix::new_finite(rows as usize, cols as usize, data)
}

pub fn save_jsm(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    write_jsm(BufWriter::new(File::create(path)?), m)
}

pub fn load_jsm(path: impl AsRef<Path>) -> Result<Matrix> {
    read_jsm(BufReader::new(File::open(path)?))
}

/// Writes entries with Rust's shortest round-trip formatting.
pub fn write_csv<W: Write>(mut w: W, m: &Matrix) -> Result<()> {
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV matrix; blank lines are skipped and every row must have the
/// same number of fields.
pub fn read_csv<R: BufRead>(r: R) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("line {}: {e}: {f:?}", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let m = Matrix::from_rows(&rows).map_err(|e| Error::Format(e.to_string()))?;
    if !m.is_finite() {
        return Err(Error::NonFinite("CSV matrix".into()));
    }
    Ok(m)
}

pub fn save_csv(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    write_csv(BufWriter::new(File::create(path)?), m)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    read_csv(BufReader::new(File::open(path)?))
}
