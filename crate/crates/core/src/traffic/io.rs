//! Coordinate text format for traffic matrices.
//!
//! ```text
//! %%netsense-matrix coordinate v1
//! window 0
//! 2 3
//! 0 0 2
//! 0 1 1
//! 1 1 3
//! ```
//!
//! Line 1 is the magic, line 2 the window id, line 3 `dim nnz`, followed by
//! exactly `nnz` lines `row col value` (0-based, row-major, columns
//! ascending within a row). Writing then reading gives back the same CSR
//! arrays.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{MatrixError, TrafficMatrix};

pub const MAGIC: &str = "%%netsense-matrix coordinate v1";

#[derive(Debug, Error)]
pub enum MatrixIoError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("header declares {declared} entries but {found} were found")]
    NnzMismatch { declared: usize, found: usize },
    #[error("invalid matrix: {0}")]
    Invalid(#[from] MatrixError),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<MatrixIoError>,
    },
}

impl MatrixIoError {
    fn in_file(self, path: &Path) -> Self {
        MatrixIoError::File {
            path: path.to_path_buf(),
            source: Box::new(self),
        }
    }
}

pub fn write_matrix_to<W: Write>(m: &TrafficMatrix, mut out: W) -> io::Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "window {}", m.window())?;
    writeln!(out, "{} {}", m.dim(), m.nnz())?;
    for (row, col, value) in m.entries() {
        writeln!(out, "{row} {col} {value}")?;
    }
    out.flush()
}

pub fn read_matrix_from<R: BufRead>(input: R) -> Result<TrafficMatrix, MatrixIoError> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next_line = |what: &str| -> Result<(usize, String), MatrixIoError> {
        match lines.next() {
            Some((n, line)) => Ok((n, line?)),
            None => Err(MatrixIoError::Parse {
                line: 0,
                message: format!("unexpected end of file, expected {what}"),
            }),
        }
    };

    let (n, magic) = next_line("header")?;
    if magic.trim_end() != MAGIC {
        return Err(parse_err(n, format!("bad magic line {magic:?}")));
    }
    let (n, window_line) = next_line("window line")?;
    let window = match window_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["window", t] => parse_field::<u64>(n, t, "window id")?,
        _ => return Err(parse_err(n, "expected `window <id>`")),
    };
    let (n, size_line) = next_line("size line")?;
    let [dim, nnz] = parse_fields::<2>(n, &size_line)?;

    let mut entries = Vec::with_capacity(nnz as usize);
    let mut found = 0usize;
    for (n, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        found += 1;
        if found > nnz as usize {
            continue;
        }
        let [row, col, value] = parse_fields::<3>(n, &line)?;
        let row = u32::try_from(row).map_err(|_| parse_err(n, "row index too large"))?;
        let col = u32::try_from(col).map_err(|_| parse_err(n, "column index too large"))?;
        if value == 0 {
            return Err(parse_err(n, "explicit zero entry"));
        }
        if let Some(&(prev_row, prev_col, _)) = entries.last() {
            if (row, col) <= (prev_row, prev_col) {
                return Err(parse_err(n, "entries not strictly row-major"));
            }
        }
        if row as u64 >= dim || col as u64 >= dim {
            return Err(parse_err(n, format!("entry ({row}, {col}) outside dimension {dim}")));
        }
        entries.push((row, col, value));
    }
    if found != nnz as usize {
        return Err(MatrixIoError::NnzMismatch {
            declared: nnz as usize,
            found,
        });
    }
    Ok(TrafficMatrix::from_sorted_entries(window, dim as usize, entries)?)
}

pub fn write_matrix(m: &TrafficMatrix, path: impl AsRef<Path>) -> Result<(), MatrixIoError> {
    let path = path.as_ref();
    File::create(path)
        .and_then(|f| write_matrix_to(m, BufWriter::new(f)))
        .map_err(|e| MatrixIoError::from(e).in_file(path))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<TrafficMatrix, MatrixIoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| MatrixIoError::from(e).in_file(path))?;
    read_matrix_from(BufReader::new(file)).map_err(|e| e.in_file(path))
}

fn parse_err(line: usize, message: impl Into<String>) -> MatrixIoError {
    MatrixIoError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_field<T: std::str::FromStr>(line: usize, field: &str, what: &str) -> Result<T, MatrixIoError> {
    field
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} {field:?}")))
}

fn parse_fields<const N: usize>(line: usize, text: &str) -> Result<[u64; N], MatrixIoError> {
    let mut out = [0u64; N];
    let mut fields = text.split_whitespace();
    for slot in out.iter_mut() {
        let field = fields
            .next()
            .ok_or_else(|| parse_err(line, format!("expected {N} fields")))?;
        *slot = parse_field(line, field, "integer")?;
    }
    if fields.next().is_some() {
        return Err(parse_err(line, format!("expected {N} fields")));
    }
    Ok(out)
}
