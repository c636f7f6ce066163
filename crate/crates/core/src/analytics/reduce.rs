//! Batched sum reduction and maximum scan over a scheduler.
//!
//! The input is split evenly across the scheduler's resources and each
//! resource's share is cut into `b_n` batches. Round `k` pushes batch `k` of
//! every resource as one bulk stage and waits for it before moving on.
//! Inside a round, resource `d` folds its batch into its own partial slot
//! `partials[d]`; the caller combines the slots after the last round.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::exec::{just, sync_wait};
use crate::partition::{make_batches, partition_even, BatchCount, Span};
use crate::resources::Scheduler;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Reduction {
    Sum,
    Max,
}

impl Reduction {
    fn fold(self, data: &[u64]) -> u64 {
        match self {
            Reduction::Sum => data.iter().sum(),
            Reduction::Max => data.iter().copied().max().unwrap_or(0),
        }
    }

    fn update(self, slot: &AtomicU64, value: u64) {
        match self {
            Reduction::Sum => slot.fetch_add(value, Ordering::Relaxed),
            Reduction::Max => slot.fetch_max(value, Ordering::Relaxed),
        };
    }

    fn combine(self, a: u64, b: u64) -> u64 {
        match self {
            Reduction::Sum => a + b,
            Reduction::Max => a.max(b),
        }
    }
}

/// Sum of `data`; 0 when empty.
pub fn sum_reduce(data: &[u64], sched: &Scheduler, batches: BatchCount) -> u64 {
    batched_reduce(data, sched, batches, Reduction::Sum)
}

/// Maximum of `data`; 0 when empty.
pub fn max_scan(data: &[u64], sched: &Scheduler, batches: BatchCount) -> u64 {
    batched_reduce(data, sched, batches, Reduction::Max)
}

fn batched_reduce(data: &[u64], sched: &Scheduler, batches: BatchCount, op: Reduction) -> u64 {
    let resources = sched.resource_count();
    let plan = partition_even(data.len(), resources).expect("schedulers have at least one resource");
    let all_batches = make_batches(&plan, batches.get()).expect("batch count is nonzero");
    // One bulk index per worker-sized chunk, so every worker of a resource
    // gets a slice of that resource's batch.
    let chunks: NonZeroUsize = sched.max_workers();
    let partials: Vec<AtomicU64> = (0..resources).map(|_| AtomicU64::new(0)).collect();

    for k in 0..batches.get() {
        let round: Vec<Span> = (0..resources)
            .map(|d| all_batches[d * batches.get() + k].view)
            .collect();
        if round.iter().all(Span::is_empty) {
            continue;
        }
        let work = just((data, round.as_slice(), partials.as_slice()))
            .on(sched.clone())
            .bulk(resources * chunks.get(), move |i, d, (data, round, partials)| {
                debug_assert_eq!(i / chunks.get(), d, "chunk dispatched to a foreign resource");
                let view = round[d].piece(chunks, i % chunks.get());
                if !view.is_empty() {
                    op.update(&partials[d], op.fold(&data[view.range()]));
                }
            });
        sync_wait(work).expect("reduction tasks do not fail");
    }

    partials
        .into_iter()
        .map(AtomicU64::into_inner)
        .fold(0, |acc, p| op.combine(acc, p))
}
