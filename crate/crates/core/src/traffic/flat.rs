//! Flat per-nonzero containers derived from a traffic matrix.

use serde::{Deserialize, Serialize};

use super::{MatrixError, TrafficMatrix};

/// The edge, weight and degree sequences analytics run over.
///
/// `out_degrees`/`row_sums` hold one entry per source that sent anything,
/// ascending by row; `in_degrees`/`col_sums` likewise per destination,
/// ascending by column.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatContainers {
    pub edges: Vec<(u32, u32)>,
    pub weights: Vec<u64>,
    pub out_degrees: Vec<u64>,
    pub in_degrees: Vec<u64>,
    pub row_sums: Vec<(u32, u64)>,
    pub col_sums: Vec<(u32, u64)>,
}

impl FlatContainers {
    /// Checks the cross-container invariants.
    pub fn is_consistent(&self) -> bool {
        let total: u64 = self.weights.iter().sum();
        self.edges.len() == self.weights.len()
            && self.out_degrees.len() == self.row_sums.len()
            && self.in_degrees.len() == self.col_sums.len()
            && self.out_degrees.iter().sum::<u64>() == self.edges.len() as u64
            && self.in_degrees.iter().sum::<u64>() == self.edges.len() as u64
            && self.row_sums.iter().map(|r| r.1).sum::<u64>() == total
            && self.col_sums.iter().map(|c| c.1).sum::<u64>() == total
    }
}

pub fn to_flat(m: &TrafficMatrix) -> Result<FlatContainers, MatrixError> {
    m.validate()?;
    let nnz = m.nnz();
    let mut flat = FlatContainers {
        edges: Vec::with_capacity(nnz),
        weights: m.values.clone(),
        ..FlatContainers::default()
    };

    for (row, w) in m.row_ptr.windows(2).enumerate() {
        if w[0] == w[1] {
            continue;
        }
        let row = row as u32;
        flat.edges.extend(m.col_idx[w[0]..w[1]].iter().map(|&c| (row, c)));
        flat.out_degrees.push((w[1] - w[0]) as u64);
        flat.row_sums.push((row, m.values[w[0]..w[1]].iter().sum()));
    }

    let mut col_count = vec![0u64; m.dim];
    let mut col_sum = vec![0u64; m.dim];
    for (&c, &v) in m.col_idx.iter().zip(&m.values) {
        col_count[c as usize] += 1;
        col_sum[c as usize] += v;
    }
    for (col, (&count, &sum)) in col_count.iter().zip(&col_sum).enumerate() {
        if count > 0 {
            flat.in_degrees.push(count);
            flat.col_sums.push((col as u32, sum));
        }
    }
    Ok(flat)
}
