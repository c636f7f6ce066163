//! Execution resources behind a [`Scheduler`].
//!
//! Three backings exist:
//!
//! * **inline** runs every task on the awaiting thread, in index order;
//! * **pool** is a single resource backed by a fixed set of worker threads;
//! * **group** is an indexed list of pools, each one standing in for a
//!   device of a multi-device node.
//!
//! For a bulk stage of size `n` on a group of `R` pools, resource `r`
//! executes span `r` of the even split of `[0, n)` (remainder to the
//! lowest ids). There is no stealing across resources, so a task running
//! with `resource_id = r` may treat per-resource slot `r` as its own.

use std::fmt;
use std::num::NonZeroUsize;
use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::exec::ExecError;
use crate::partition::Span;

/// Identifier of an execution resource, in `[0, resource_count)`.
pub type ResourceId = usize;

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("a worker pool needs at least one worker")]
    ZeroWorkers,
    #[error("a resource group needs at least one member pool")]
    EmptyGroup,
    #[error("failed to start worker pool: {0}")]
    PoolBuild(#[from] rayon::ThreadPoolBuildError),
}

/// Construction parameters for one worker-pool resource.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoolSpec {
    pub workers: usize,
}

impl PoolSpec {
    pub fn new(workers: usize) -> Self {
        Self { workers }
    }
}

/// Handle to the resources stage execution is bound to.
///
/// Cloning is cheap and the clone refers to the same worker threads.
#[derive(Clone)]
pub struct Scheduler {
    backing: Arc<Backing>,
}

enum Backing {
    Inline,
    Pool(Pool),
    Group(Vec<Pool>),
}

struct Pool {
    workers: NonZeroUsize,
    threads: rayon::ThreadPool,
}

impl Pool {
    fn new(spec: PoolSpec, name: String) -> Result<Self, ResourceError> {
        let workers = NonZeroUsize::new(spec.workers).ok_or(ResourceError::ZeroWorkers)?;
        let threads = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.get())
            .thread_name(move |w| format!("{name}-w{w}"))
            .build()?;
        Ok(Self { workers, threads })
    }
}

/// A scheduler whose tasks run on the awaiting thread.
pub fn make_inline_scheduler() -> Scheduler {
    Scheduler {
        backing: Arc::new(Backing::Inline),
    }
}

/// A single resource backed by `workers` threads.
pub fn make_pool_scheduler(workers: usize) -> Result<Scheduler, ResourceError> {
    let pool = Pool::new(PoolSpec::new(workers), "netsense-pool".into())?;
    Ok(Scheduler {
        backing: Arc::new(Backing::Pool(pool)),
    })
}

/// An indexed group of pools; resource `r` is `resources[r]`.
pub fn make_group_scheduler(resources: &[PoolSpec]) -> Result<Scheduler, ResourceError> {
    if resources.is_empty() {
        return Err(ResourceError::EmptyGroup);
    }
    let pools = resources
        .iter()
        .enumerate()
        .map(|(r, spec)| Pool::new(*spec, format!("netsense-r{r}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Scheduler {
        backing: Arc::new(Backing::Group(pools)),
    })
}

/// A group of `resources` identical pools with `workers_per_resource`
/// threads each, or the host-derived default when `None`.
pub fn make_uniform_group(
    resources: usize,
    workers_per_resource: Option<usize>,
) -> Result<Scheduler, ResourceError> {
    let workers = workers_per_resource.unwrap_or_else(|| default_workers_per_resource(resources));
    make_group_scheduler(&vec![PoolSpec::new(workers); resources])
}

/// Host threads divided evenly among `resources`, never below one.
pub fn default_workers_per_resource(resources: usize) -> usize {
    let host = std::thread::available_parallelism().map_or(1, NonZeroUsize::get);
    (host / resources.max(1)).max(1)
}

/// Owner of a scheduler, mirroring a device context: every call to
/// [`ResourceContext::get_scheduler`] hands out the same resources.
pub struct ResourceContext {
    scheduler: Scheduler,
}

impl ResourceContext {
    pub fn new(scheduler: Scheduler) -> Self {
        Self { scheduler }
    }

    pub fn get_scheduler(&self) -> Scheduler {
        self.scheduler.clone()
    }
}

impl Scheduler {
    pub fn resource_count(&self) -> usize {
        match &*self.backing {
            Backing::Inline | Backing::Pool(_) => 1,
            Backing::Group(pools) => pools.len(),
        }
    }

    /// Worker threads of each resource, indexed by resource id. The inline
    /// resource counts as one worker.
    pub fn workers(&self) -> Vec<usize> {
        match &*self.backing {
            Backing::Inline => vec![1],
            Backing::Pool(pool) => vec![pool.workers.get()],
            Backing::Group(pools) => pools.iter().map(|p| p.workers.get()).collect(),
        }
    }

    /// Largest worker count of any single resource.
    pub fn max_workers(&self) -> NonZeroUsize {
        match &*self.backing {
            Backing::Inline => NonZeroUsize::MIN,
            Backing::Pool(pool) => pool.workers,
            Backing::Group(pools) => pools
                .iter()
                .map(|p| p.workers)
                .max()
                .unwrap_or(NonZeroUsize::MIN),
        }
    }

    pub fn is_inline(&self) -> bool {
        matches!(*self.backing, Backing::Inline)
    }

    /// True when both handles drive the same underlying resources.
    pub fn same_resources(&self, other: &Scheduler) -> bool {
        Arc::ptr_eq(&self.backing, &other.backing)
    }

    /// Span of a bulk iteration space of size `n` executed by `resource`.
    pub fn assigned_span(&self, n: usize, resource: ResourceId) -> Span {
        let count = NonZeroUsize::new(self.resource_count()).unwrap_or(NonZeroUsize::MIN);
        Span::new(0, n).piece(count, resource)
    }

    /// Invokes `task(i, resource_id)` exactly once for every `i < n` and
    /// returns once all invocations have finished.
    ///
    /// The first failure (returned error or panic) is reported; invocations
    /// not yet started when it happens are skipped.
    pub(crate) fn run_bulk(&self, n: usize, task: &BulkTask<'_>) -> Result<(), ExecError> {
        if n == 0 {
            return Ok(());
        }
        let failure = FailureSlot::default();
        match &*self.backing {
            Backing::Inline => run_span(task, 0, Span::new(0, n), &failure),
            Backing::Pool(pool) => scatter(std::slice::from_ref(pool), &[Span::new(0, n)], task, &failure),
            Backing::Group(pools) => {
                let count = NonZeroUsize::new(pools.len()).expect("group is nonempty");
                let spans: Vec<Span> = Span::new(0, n).split_even(count).collect();
                scatter(pools, &spans, task, &failure);
            }
        }
        failure.into_result()
    }
}

impl fmt::Debug for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.backing {
            Backing::Inline => f.write_str("Scheduler::Inline"),
            Backing::Pool(p) => write!(f, "Scheduler::Pool(workers={})", p.workers),
            Backing::Group(_) => write!(f, "Scheduler::Group(workers={:?})", self.workers()),
        }
    }
}

pub(crate) type BulkTask<'t> = dyn Fn(usize, ResourceId) -> Result<(), String> + Sync + 't;

#[derive(Default)]
struct FailureSlot {
    tripped: AtomicBool,
    first: Mutex<Option<ExecError>>,
}

impl FailureSlot {
    fn record(&self, err: ExecError) {
        let mut first = self.first.lock().unwrap_or_else(|e| e.into_inner());
        if first.is_none() {
            *first = Some(err);
        }
        self.tripped.store(true, Ordering::Release);
    }

    fn tripped(&self) -> bool {
        self.tripped.load(Ordering::Acquire)
    }

    fn into_result(self) -> Result<(), ExecError> {
        match self.first.into_inner().unwrap_or_else(|e| e.into_inner()) {
            Some(err) => Err(err),
            None => Ok(()),
        }
    }
}

/// Spawns the spans of `pools[first..]` into their pools and blocks until
/// every spawned job is done. Each pool's `in_place_scope` waits for its own
/// jobs only after the later pools have been fed, so all pools run at once.
fn scatter(pools: &[Pool], spans: &[Span], task: &BulkTask<'_>, failure: &FailureSlot) {
    fn feed(pools: &[Pool], spans: &[Span], r: usize, task: &BulkTask<'_>, failure: &FailureSlot) {
        let Some(pool) = pools.get(r) else {
            return;
        };
        pool.threads.in_place_scope(|scope| {
            for chunk in spans[r].split_even(pool.workers).filter(|c| !c.is_empty()) {
                scope.spawn(move |_| run_span(task, r, chunk, failure));
            }
            feed(pools, spans, r + 1, task, failure);
        });
    }
    feed(pools, spans, 0, task, failure);
}

fn run_span(task: &BulkTask<'_>, resource: ResourceId, span: Span, failure: &FailureSlot) {
    let mut current = span.offset;
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| {
        for i in span.range() {
            if failure.tripped() {
                return Ok(());
            }
            current = i;
            task(i, resource)?;
        }
        Ok(())
    }));
    let err = match outcome {
        Ok(Ok(())) => return,
        Ok(Err(message)) => ExecError::TaskFailed {
            index: current,
            resource,
            message,
        },
        Err(payload) => ExecError::TaskPanicked {
            index: current,
            resource,
            message: panic_message(payload.as_ref()),
        },
    };
    failure.record(err);
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_owned()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_owned()
    }
}
