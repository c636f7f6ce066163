//! Packet streams, anonymization and windowed traffic matrices.

mod anonymize;
mod flat;
pub mod io;
mod matrix;
mod packets;

use thiserror::Error;

pub use anonymize::{anonymize, AnonymizationMap};
pub use flat::{to_flat, FlatContainers};
pub use io::{read_matrix, read_matrix_from, write_matrix, write_matrix_to, MatrixIoError};
pub use matrix::{build_matrices, TrafficMatrix};
pub use packets::{generate_packets, read_packets, write_packets, PacketGenerator, PacketRecord};

/// Structural violations of the CSR invariants.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix dimension must be positive")]
    ZeroDimension,
    #[error("row_ptr has {actual} entries, expected {expected}")]
    RowPtrLength { expected: usize, actual: usize },
    #[error("col_idx has {col_idx} entries but values has {values}")]
    LengthMismatch { col_idx: usize, values: usize },
    #[error("row_ptr must start at 0 and end at nnz = {nnz}")]
    RowPtrBounds { nnz: usize },
    #[error("row_ptr decreases at row {row}")]
    RowPtrDecreasing { row: usize },
    #[error("entries of row {row} are not strictly increasing")]
    UnsortedRow { row: usize },
    #[error("index {index} outside dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("stored zero at position {position}")]
    ZeroValue { position: usize },
    #[error("row of length {row_len} in a {dim}x{dim} dense matrix")]
    NotSquare { dim: usize, row_len: usize },
}

#[derive(Debug, Error)]
pub enum TrafficError {
    #[error("address space must contain at least one address")]
    EmptyAddressSpace,
    #[error("invalid-packet fraction {0} is outside [0, 1]")]
    InvalidFraction(f64),
    #[error("window size must be at least 1")]
    ZeroWindow,
    #[error("packet file length {len} is not a multiple of the record size")]
    TruncatedRecord { len: usize },
    #[error("record {record} has valid flag {flag}, expected 0 or 1")]
    BadValidFlag { record: usize, flag: u8 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
