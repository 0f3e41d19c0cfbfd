//! Feature matrices and their on-disk formats.
//!
//! Two formats are supported:
//!
//! * **FVEC** (binary): the magic bytes `FVEC`, a version byte `0x01`, then
//!   little-endian `u32` row count and `u32` dimensionality, then `n * d`
//!   little-endian IEEE-754 `f32` values in row-major order. No padding.
//! * **CSV**: an optional header line `# n=<n> d=<d>` followed by one
//!   comma-separated row per line.
//!
//! Values are held as `f64` in memory; FVEC stores them as `f32`.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const FVEC_MAGIC: &[u8; 4] = b"FVEC";
pub const FVEC_VERSION: u8 = 0x01;
const FVEC_HEADER_LEN: usize = 4 + 1 + 4 + 4;

/// Dense `rows x dims` matrix of finite embedding coordinates, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    dims: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, dims: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || dims == 0 {
            return Err(Error::InvalidParameter(format!(
                "feature matrix must be non-empty, got {rows}x{dims}"
            )));
        }
        if data.len() != rows * dims {
            return Err(Error::InvalidParameter(format!(
                "expected {} values for a {rows}x{dims} matrix, got {}",
                rows * dims,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dims,
                col: pos % dims,
            });
        }
        Ok(FeatureMatrix { rows, dims, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dims = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * dims);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dims {
                return Err(Error::InvalidParameter(format!(
                    "row {i} has {} values, expected {dims}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        FeatureMatrix::new(rows.len(), dims, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dims..(i + 1) * self.dims]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dims)
    }

    /// Gathers the given rows, in order, into a new matrix.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.dims);
        for &i in indices {
            if i >= self.rows {
                return Err(Error::InvalidParameter(format!(
                    "row {i} out of range for {} rows",
                    self.rows
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix::new(indices.len(), self.dims, data)
    }

    /// Returns a copy with every row scaled to unit euclidean norm.
    /// All-zero rows are left untouched.
    pub fn l2_normalized(&self) -> Self {
        let mut data = self.data.clone();
        for row in data.chunks_exact_mut(self.dims) {
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|v| *v /= norm);
            }
        }
        FeatureMatrix {
            rows: self.rows,
            dims: self.dims,
            data,
        }
    }
}

/// Squared euclidean distance between two equal-length slices.
#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureFormat {
    Csv,
    Fvec,
}

impl FeatureFormat {
    /// Guesses the format from a file extension; anything but `.csv` is FVEC.
    pub fn from_extension(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => FeatureFormat::Csv,
            _ => FeatureFormat::Fvec,
        }
    }
}

impl FromStr for FeatureFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(FeatureFormat::Csv),
            "fvec" => Ok(FeatureFormat::Fvec),
            other => Err(Error::InvalidParameter(format!(
                "unknown feature format {other:?}"
            ))),
        }
    }
}

impl fmt::Display for FeatureFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureFormat::Csv => "csv",
            FeatureFormat::Fvec => "fvec",
        })
    }
}

/// Loads a feature file, detecting FVEC by its magic bytes and falling back
/// to CSV otherwise.
pub fn load_features(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(FVEC_MAGIC) {
        decode_fvec(path, &bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| Error::MalformedHeader {
            path: path.into(),
            reason: "neither FVEC magic nor UTF-8 text".into(),
        })?;
        decode_csv(path, &text)
    }
}

pub fn save_features(m: &FeatureMatrix, path: impl AsRef<Path>, format: FeatureFormat) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        FeatureFormat::Fvec => {
            let bytes = encode_fvec(m)?;
            out.write_all(&bytes).map_err(|e| Error::io(path, e))?;
        }
        FeatureFormat::Csv => {
            let text = encode_csv(m);
            out.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))?;
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn encode_fvec(m: &FeatureMatrix) -> Result<Vec<u8>> {
    let too_big = |what: &str, v: usize| {
        Error::InvalidParameter(format!("{what} {v} does not fit the FVEC u32 header"))
    };
    let n = u32::try_from(m.rows).map_err(|_| too_big("row count", m.rows))?;
    let d = u32::try_from(m.dims).map_err(|_| too_big("dimensionality", m.dims))?;
    let mut bytes = Vec::with_capacity(FVEC_HEADER_LEN + 4 * m.data.len());
    bytes.extend_from_slice(FVEC_MAGIC);
    bytes.push(FVEC_VERSION);
    bytes.extend_from_slice(&n.to_le_bytes());
    bytes.extend_from_slice(&d.to_le_bytes());
    for (pos, &v) in m.data.iter().enumerate() {
        let narrow = v as f32;
        if !narrow.is_finite() {
            return Err(Error::NonFinite {
                row: pos / m.dims,
                col: pos % m.dims,
            });
        }
        bytes.extend_from_slice(&narrow.to_le_bytes());
    }
    Ok(bytes)
}

fn decode_fvec(path: &Path, bytes: &[u8]) -> Result<FeatureMatrix> {
    let malformed = |reason: &str| Error::MalformedHeader {
        path: path.into(),
        reason: reason.into(),
    };
    if bytes.len() < FVEC_HEADER_LEN {
        return Err(malformed("truncated FVEC header"));
    }
    if bytes[4] != FVEC_VERSION {
        return Err(malformed(&format!("unsupported FVEC version {:#04x}", bytes[4])));
    }
    let n = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    let d = u32::from_le_bytes(bytes[9..13].try_into().unwrap()) as usize;
    if n == 0 || d == 0 {
        return Err(malformed(&format!("empty shape n={n} d={d}")));
    }
    let payload = &bytes[FVEC_HEADER_LEN..];
    let expected = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(4))
        .ok_or_else(|| malformed("shape overflows"))?;
    if payload.len() != expected {
        return Err(Error::DimensionMismatch {
            path: path.into(),
            reason: format!(
                "header declares {n}x{d} ({expected} payload bytes) but file holds {} payload bytes",
                payload.len()
            ),
        });
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    FeatureMatrix::new(n, d, data)
}

pub fn encode_csv(m: &FeatureMatrix) -> String {
    let mut text = format!("# n={} d={}\n", m.rows, m.dims);
    for row in m.iter_rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    text
}

fn parse_csv_header(path: &Path, line: &str) -> Result<(usize, usize)> {
    let malformed = || Error::MalformedHeader {
        path: path.into(),
        reason: format!("expected `# n=<n> d=<d>`, got {line:?}"),
    };
    let body = line.trim_start_matches('#').trim();
    let mut n = None;
    let mut d = None;
    for field in body.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(malformed)?;
        let value: usize = value.parse().map_err(|_| malformed())?;
        match key {
            "n" => n = Some(value),
            "d" => d = Some(value),
            _ => return Err(malformed()),
        }
    }
    match (n, d) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(malformed()),
    }
}

fn decode_csv(path: &Path, text: &str) -> Result<FeatureMatrix> {
    let mismatch = |reason: String| Error::DimensionMismatch {
        path: path.into(),
        reason,
    };
    let mut header = None;
    let mut dims = None;
    let mut rows = 0usize;
    let mut data = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if header.is_some() || rows > 0 {
                return Err(Error::MalformedHeader {
                    path: path.into(),
                    reason: format!("unexpected header at line {}", lineno + 1),
                });
            }
            let (n, d) = parse_csv_header(path, line)?;
            header = Some(n);
            dims = Some(d);
            continue;
        }
        let start = data.len();
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                path: path.into(),
                line: lineno + 1,
                reason: format!("not a number: {:?}", field.trim()),
            })?;
            data.push(v);
        }
        let width = data.len() - start;
        match dims {
            Some(d) if d != width => {
                return Err(mismatch(format!(
                    "line {} has {width} values, expected {d}",
                    lineno + 1
                )))
            }
            None => dims = Some(width),
            _ => {}
        }
        rows += 1;
    }
    if let Some(n) = header {
        if n != rows {
            return Err(mismatch(format!("header declares {n} rows, file holds {rows}")));
        }
    }
    let dims = dims.unwrap_or(0);
    if rows == 0 {
        return Err(mismatch("no data rows".into()));
    }
    FeatureMatrix::new(rows, dims, data)
}
