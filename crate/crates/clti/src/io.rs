//! Bit-exact binary persistence for matrices and signal blocks, model
//! directories, a plain-text matrix importer and the benchmark CSV schema.
//!
//! Binary layout (`.clti` files, little-endian):
//!
//! ```text
//! magic   4 bytes  "CLTI"
//! version u32      1
//! kind    u8       0 = matrix, 1 = signal block
//! rows    u64
//! cols    u64
//! payload rows*cols f64, row-major
//! ```

use crate::cascade::SignalBlock;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lti::{DiscreteLti, Scheme};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: [u8; 4] = *b"CLTI";
const VERSION: u32 = 1;
const KIND_MATRIX: u8 = 0;
const KIND_SIGNAL: u8 = 1;

/// Either payload kind a `.clti` file can hold.
#[derive(Debug, Clone)]
pub enum FilePayload {
    Matrix(Matrix),
    Signal(SignalBlock),
}

fn file_access(path: &Path, source: std::io::Error) -> Error {
    Error::FileAccess {
        path: path.display().to_string(),
        source,
    }
}

fn format_err(path: &Path, field: &str) -> Error {
    Error::Format {
        path: path.display().to_string(),
        field: field.to_string(),
    }
}

fn write_payload(path: &Path, kind: u8, rows: u64, cols: u64, row_major: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(21 + row_major.len() * 8);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(kind);
    buf.extend_from_slice(&rows.to_le_bytes());
    buf.extend_from_slice(&cols.to_le_bytes());
    for v in row_major {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let mut f = fs::File::create(path).map_err(|e| file_access(path, e))?;
    f.write_all(&buf).map_err(|e| file_access(path, e))?;
    Ok(())
}

/// Write a matrix to a `.clti` file.
pub fn write_matrix(path: impl AsRef<Path>, a: &Matrix) -> Result<()> {
    write_payload(
        path.as_ref(),
        KIND_MATRIX,
        a.rows() as u64,
        a.cols() as u64,
        a.data(),
    )
}

/// Write a signal block to a `.clti` file (rows = dim, cols = length).
pub fn write_signal(path: impl AsRef<Path>, s: &SignalBlock) -> Result<()> {
    // Internal storage is column-major; the file is row-major.
    let (dim, len) = (s.dim(), s.len());
    let mut row_major = vec![0.0; dim * len];
    for l in 0..len {
        let col = s.column(l);
        for i in 0..dim {
            row_major[i * len + l] = col[i];
        }
    }
    write_payload(path.as_ref(), KIND_SIGNAL, dim as u64, len as u64, &row_major)
}

/// Read either payload kind, validating the header field by field.
pub fn read_file(path: impl AsRef<Path>) -> Result<FilePayload> {
    let path = path.as_ref();
    let mut f = fs::File::open(path).map_err(|e| file_access(path, e))?;
    let mut bytes = Vec::new();
    f.read_to_end(&mut bytes).map_err(|e| file_access(path, e))?;
    if bytes.len() < 25 {
        return Err(format_err(path, "truncated header"));
    }
    if bytes[0..4] != MAGIC {
        return Err(format_err(path, "bad magic"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(format_err(path, &format!("unsupported version {version}")));
    }
    let kind = bytes[8];
    let rows = u64::from_le_bytes(bytes[9..17].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[17..25].try_into().unwrap()) as usize;
    if rows == 0 || cols == 0 {
        return Err(format_err(path, "zero dimension"));
    }
    let need = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| format_err(path, "dimension overflow"))?;
    if bytes.len() != 25 + need {
        return Err(format_err(
            path,
            &format!("truncated payload: need {} bytes, have {}", need, bytes.len() - 25),
        ));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for chunk in bytes[25..].chunks_exact(8) {
        data.push(f64::from_le_bytes(chunk.try_into().unwrap()));
    }
    match kind {
        KIND_MATRIX => Ok(FilePayload::Matrix(Matrix::from_vec(rows, cols, data)?)),
        KIND_SIGNAL => {
            let mut col_major = vec![0.0; rows * cols];
            for i in 0..rows {
                for l in 0..cols {
                    col_major[l * rows + i] = data[i * cols + l];
                }
            }
            Ok(FilePayload::Signal(SignalBlock::from_flat(rows, cols, col_major)?))
        }
        other => Err(format_err(path, &format!("unknown kind {other}"))),
    }
}

/// Read a file that must contain a matrix.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    match read_file(&path)? {
        FilePayload::Matrix(m) => Ok(m),
        FilePayload::Signal(_) => Err(format_err(path.as_ref(), "expected kind 0 (matrix), found 1")),
    }
}

/// Read a file that must contain a signal block.
pub fn read_signal(path: impl AsRef<Path>) -> Result<SignalBlock> {
    match read_file(&path)? {
        FilePayload::Signal(s) => Ok(s),
        FilePayload::Matrix(_) => Err(format_err(path.as_ref(), "expected kind 1 (signal), found 0")),
    }
}

/// Plain-text comma-separated matrix importer for hand-made fixtures.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| file_access(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|tok| tok.trim().parse::<f64>()).collect();
        match row {
            Ok(r) => rows.push(r),
            Err(_) => {
                return Err(format_err(path, &format!("unparsable number on line {}", lineno + 1)))
            }
        }
    }
    if rows.is_empty() {
        return Err(format_err(path, "no rows"));
    }
    Matrix::from_rows(&rows)
}

/// One benchmark result; `rel_l2_err` stays empty for the oracle itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: String,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub len: usize,
    pub stages: usize,
    pub tol: f64,
    pub matvec_count: u64,
    pub wall_ns: u64,
    pub rel_l2_err: Option<f64>,
}

pub const CSV_HEADER: &str = "method,m,p,q,L,stages,tol,matvec_count,wall_ns,rel_l2_err";

/// 17 significant digits: enough to reproduce any f64 exactly on parse.
fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write benchmark rows as CSV with the fixed header.
pub fn export_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let err = r.rel_l2_err.map(fmt_real).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.method,
            r.m,
            r.p,
            r.q,
            r.len,
            r.stages,
            fmt_real(r.tol),
            r.matvec_count,
            r.wall_ns,
            err
        ));
    }
    fs::write(path, out).map_err(|e| file_access(path, e))
}

/// Model directory layout: `abar.clti`, `bbar.clti`, `c.clti`, `d.clti` and a
/// `meta` text file holding `delta` and `scheme` as `key=value` lines.
pub fn write_model(dir: impl AsRef<Path>, sys: &DiscreteLti) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| file_access(dir, e))?;
    write_matrix(dir.join("abar.clti"), sys.abar())?;
    write_matrix(dir.join("bbar.clti"), sys.bbar())?;
    write_matrix(dir.join("c.clti"), sys.c())?;
    write_matrix(dir.join("d.clti"), sys.d())?;
    let meta = format!("delta={}\nscheme={}\n", sys.delta(), sys.scheme().as_str());
    let meta_path = dir.join("meta");
    fs::write(&meta_path, meta).map_err(|e| file_access(&meta_path, e))
}

/// Load a model directory written by [`write_model`].
pub fn read_model(dir: impl AsRef<Path>) -> Result<DiscreteLti> {
    let dir = dir.as_ref();
    let abar = read_matrix(dir.join("abar.clti"))?;
    let bbar = read_matrix(dir.join("bbar.clti"))?;
    let c = read_matrix(dir.join("c.clti"))?;
    let d = read_matrix(dir.join("d.clti"))?;
    let meta_path = dir.join("meta");
    let text = fs::read_to_string(&meta_path).map_err(|e| file_access(&meta_path, e))?;
    let mut delta = None;
    let mut scheme = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some(("delta", v)) => {
                delta = Some(v.trim().parse::<f64>().map_err(|_| {
                    format_err(&meta_path, "delta is not a number")
                })?)
            }
            Some(("scheme", v)) => scheme = Some(Scheme::parse(v.trim())?),
            _ => return Err(format_err(&meta_path, &format!("unrecognized line '{line}'"))),
        }
    }
    let delta = delta.ok_or_else(|| format_err(&meta_path, "missing delta"))?;
    let scheme = scheme.ok_or_else(|| format_err(&meta_path, "missing scheme"))?;
    DiscreteLti::new(abar, bbar, c, d, delta, scheme)
}
