//! Windowed traffic matrices in compressed sparse row form.

use super::{MatrixError, PacketRecord, TrafficError};

/// Packet counts between sources (rows) and destinations (columns) over
/// one window of the stream.
///
/// Invariants, checked on construction: `row_ptr` has `dim + 1`
/// nondecreasing entries starting at 0 and ending at `nnz`; column indices
/// are `< dim` and strictly increasing within a row; every value is at
/// least 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrafficMatrix {
    pub(crate) window: u64,
    pub(crate) dim: usize,
    pub(crate) row_ptr: Vec<usize>,
    pub(crate) col_idx: Vec<u32>,
    pub(crate) values: Vec<u64>,
}

impl TrafficMatrix {
    pub fn from_csr(
        window: u64,
        dim: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<u32>,
        values: Vec<u64>,
    ) -> Result<Self, MatrixError> {
        let m = Self {
            window,
            dim,
            row_ptr,
            col_idx,
            values,
        };
        m.validate()?;
        Ok(m)
    }

    /// Builds a matrix from dense rows. Zero entries are dropped.
    pub fn from_dense(window: u64, rows: &[Vec<u64>]) -> Result<Self, MatrixError> {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            if row.len() != dim {
                return Err(MatrixError::NotSquare { dim, row_len: row.len() });
            }
            for (j, &v) in row.iter().enumerate().filter(|(_, &v)| v > 0) {
                col_idx.push(j as u32);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self::from_csr(window, dim, row_ptr, col_idx, values)
    }

    /// Builds a matrix from `(row, col, value)` entries sorted row-major.
    pub fn from_sorted_entries(
        window: u64,
        dim: usize,
        entries: impl IntoIterator<Item = (u32, u32, u64)>,
    ) -> Result<Self, MatrixError> {
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut last_row = 0usize;
        for (row, col, value) in entries {
            let row = row as usize;
            if row >= dim {
                return Err(MatrixError::IndexOutOfRange { index: row, dim });
            }
            if row < last_row {
                return Err(MatrixError::UnsortedRow { row });
            }
            last_row = row;
            row_ptr[row + 1] += 1;
            col_idx.push(col);
            values.push(value);
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self::from_csr(window, dim, row_ptr, col_idx, values)
    }

    pub fn validate(&self) -> Result<(), MatrixError> {
        if self.dim == 0 {
            return Err(MatrixError::ZeroDimension);
        }
        if self.row_ptr.len() != self.dim + 1 {
            return Err(MatrixError::RowPtrLength {
                expected: self.dim + 1,
                actual: self.row_ptr.len(),
            });
        }
        if self.col_idx.len() != self.values.len() {
            return Err(MatrixError::LengthMismatch {
                col_idx: self.col_idx.len(),
                values: self.values.len(),
            });
        }
        let nnz = self.values.len();
        if self.row_ptr[0] != 0 || self.row_ptr[self.dim] != nnz {
            return Err(MatrixError::RowPtrBounds { nnz });
        }
        if let Some(row) = self.row_ptr.windows(2).position(|w| w[0] > w[1]) {
            return Err(MatrixError::RowPtrDecreasing { row });
        }
        for (row, w) in self.row_ptr.windows(2).enumerate() {
            let cols = &self.col_idx[w[0]..w[1]];
            if cols.windows(2).any(|c| c[0] >= c[1]) {
                return Err(MatrixError::UnsortedRow { row });
            }
            if let Some(&c) = cols.iter().find(|&&c| c as usize >= self.dim) {
                return Err(MatrixError::IndexOutOfRange {
                    index: c as usize,
                    dim: self.dim,
                });
            }
        }
        if let Some(pos) = self.values.iter().position(|&v| v == 0) {
            return Err(MatrixError::ZeroValue { position: pos });
        }
        Ok(())
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Number of packets aggregated into this matrix.
    pub fn packet_count(&self) -> u64 {
        self.values.iter().sum()
    }

    /// Nonzero entries as `(row, col, value)`, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.row_ptr.windows(2).enumerate().flat_map(move |(row, w)| {
            (w[0]..w[1]).map(move |k| (row as u32, self.col_idx[k], self.values[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        if row >= self.dim {
            return 0;
        }
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.col_idx[range.clone()].binary_search(&(col as u32)) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0,
        }
    }
}

/// Cuts `packets` into windows of `window_size` consecutive records and
/// aggregates each window's valid packets into a traffic matrix.
///
/// Packet `k` falls in window `k / window_size`; the last window may be
/// short. All matrices share the dimension `1 + max address` over the
/// whole stream.
pub fn build_matrices(packets: &[PacketRecord], window_size: usize) -> Result<Vec<TrafficMatrix>, TrafficError> {
    if window_size == 0 {
        return Err(TrafficError::ZeroWindow);
    }
    let dim = packets
        .iter()
        .map(|p| p.src.max(p.dst) as usize + 1)
        .max()
        .unwrap_or(1);
    packets
        .chunks(window_size)
        .enumerate()
        .map(|(t, window)| Ok(build_window(t as u64, dim, window)?))
        .collect()
}

fn build_window(window: u64, dim: usize, packets: &[PacketRecord]) -> Result<TrafficMatrix, MatrixError> {
    let mut keys: Vec<u64> = packets
        .iter()
        .filter(|p| p.valid)
        .map(|p| (u64::from(p.src) << 32) | u64::from(p.dst))
        .collect();
    keys.sort_unstable();

    let mut entries: Vec<(u32, u32, u64)> = Vec::new();
    for key in keys {
        let (row, col) = ((key >> 32) as u32, key as u32);
        match entries.last_mut() {
            Some(last) if last.0 == row && last.1 == col => last.2 += 1,
            _ => entries.push((row, col, 1)),
        }
    }
    TrafficMatrix::from_sorted_entries(window, dim, entries)
}
