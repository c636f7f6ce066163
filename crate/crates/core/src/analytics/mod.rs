//! Aggregate traffic measures computed with batched bulk reductions.
//!
//! | measure               | computed as                 |
//! |-----------------------|-----------------------------|
//! | `valid_packets`       | sum of `weights`            |
//! | `unique_links`        | length of `edges`           |
//! | `unique_sources`      | length of `row_sums`        |
//! | `max_fanout`          | max of `out_degrees`        |
//! | `unique_destinations` | length of `col_sums`        |
//! | `max_fanin`           | max of `in_degrees`         |
//!
//! Fan-out of a source is its number of distinct destinations, fan-in of a
//! destination its number of distinct sources.

mod oracle;
mod reduce;
mod report;

pub use oracle::oracle_analyze;
pub use reduce::{max_scan, sum_reduce};
pub use report::{AggregateReport, DatasetReport};

use crate::partition::BatchCount;
use crate::resources::Scheduler;
use crate::traffic::FlatContainers;

pub fn analyze_matrix(f: &FlatContainers, sched: &Scheduler, batches: BatchCount) -> AggregateReport {
    AggregateReport {
        valid_packets: sum_reduce(&f.weights, sched, batches),
        unique_links: f.edges.len() as u64,
        unique_sources: f.row_sums.len() as u64,
        max_fanout: max_scan(&f.out_degrees, sched, batches),
        unique_destinations: f.col_sums.len() as u64,
        max_fanin: max_scan(&f.in_degrees, sched, batches),
    }
}

/// Analyzes every matrix in order and folds the totals.
///
/// Source and destination counts in the totals are sums of per-window
/// counts; an address active in two windows is counted twice.
pub fn analyze_dataset(matrices: &[FlatContainers], sched: &Scheduler, batches: BatchCount) -> DatasetReport {
    DatasetReport::from_reports(
        matrices
            .iter()
            .map(|f| analyze_matrix(f, sched, batches))
            .collect(),
    )
}
