//! Even partitioning of an index range across execution resources, and
//! sub-partitioning of each resource's share into sequentially processed
//! batches.
//!
//! Every split follows the same rule: pieces are contiguous and ordered,
//! their lengths differ by at most one, and the remainder goes to the
//! lowest-numbered pieces. `(10, 3)` splits as `4, 3, 3`.

use std::num::NonZeroUsize;
use std::ops::Range;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("resource count must be at least 1")]
    ZeroResources,
    #[error("batch count must be at least 1")]
    ZeroBatches,
}

/// A contiguous `(offset, length)` view into an indexable container.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub offset: usize,
    pub len: usize,
}

impl Span {
    pub const fn new(offset: usize, len: usize) -> Self {
        Self { offset, len }
    }

    pub const fn end(&self) -> usize {
        self.offset + self.len
    }

    pub const fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn range(&self) -> Range<usize> {
        self.offset..self.end()
    }

    /// The `index`-th of `parts` even pieces of this span.
    ///
    /// Computed in O(1), without materializing the other pieces.
    pub fn piece(&self, parts: NonZeroUsize, index: usize) -> Span {
        let parts = parts.get();
        debug_assert!(index < parts);
        let base = self.len / parts;
        let extra = self.len % parts;
        let offset = self.offset + index * base + index.min(extra);
        let len = base + usize::from(index < extra);
        Span::new(offset, len)
    }

    /// All `parts` even pieces of this span, in order.
    pub fn split_even(self, parts: NonZeroUsize) -> impl ExactSizeIterator<Item = Span> {
        (0..parts.get()).map(move |i| self.piece(parts, i))
    }
}

/// Number of sequential batches each resource partition is cut into.
///
/// A value of one means the whole partition is processed at once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BatchCount(NonZeroUsize);

impl BatchCount {
    pub const ONE: BatchCount = BatchCount(NonZeroUsize::MIN);

    pub fn new(batches: usize) -> Result<Self, PartitionError> {
        NonZeroUsize::new(batches)
            .map(BatchCount)
            .ok_or(PartitionError::ZeroBatches)
    }

    pub fn get(self) -> usize {
        self.0.get()
    }

    pub fn as_nonzero(self) -> NonZeroUsize {
        self.0
    }
}

impl Default for BatchCount {
    fn default() -> Self {
        Self::ONE
    }
}

/// The even split of `[0, total_len)` across a fixed number of resources.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionPlan {
    total_len: usize,
    spans: Vec<Span>,
}

impl PartitionPlan {
    pub fn total_len(&self) -> usize {
        self.total_len
    }

    pub fn resource_count(&self) -> usize {
        self.spans.len()
    }

    /// Span owned by each resource, indexed by resource id.
    pub fn spans(&self) -> &[Span] {
        &self.spans
    }
}

/// One batch of one resource's partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Batch {
    pub resource_id: usize,
    pub batch_index: usize,
    pub view: Span,
}

/// Splits `[0, total_len)` evenly across `resources` partitions.
pub fn partition_even(total_len: usize, resources: usize) -> Result<PartitionPlan, PartitionError> {
    let parts = NonZeroUsize::new(resources).ok_or(PartitionError::ZeroResources)?;
    Ok(PartitionPlan {
        total_len,
        spans: Span::new(0, total_len).split_even(parts).collect(),
    })
}

/// Cuts every resource span of `plan` into `batches` even batches.
///
/// The result is ordered resource-major: batch `k` of resource `r` sits at
/// position `r * batches + k`. Batches may be empty when `batches` exceeds
/// the span length; those are no-ops for consumers.
pub fn make_batches(plan: &PartitionPlan, batches: usize) -> Result<Vec<Batch>, PartitionError> {
    let count = BatchCount::new(batches)?;
    Ok(plan
        .spans
        .iter()
        .enumerate()
        .flat_map(|(resource_id, span)| {
            span.split_even(count.as_nonzero())
                .enumerate()
                .map(move |(batch_index, view)| Batch {
                    resource_id,
                    batch_index,
                    view,
                })
        })
        .collect())
}
