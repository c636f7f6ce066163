//! A small sender algebra: lazily composed descriptions of work that only
//! run when handed to [`sync_wait`].
//!
//! ```
//! use netsense::exec::{just, sync_wait};
//! use netsense::resources::make_pool_scheduler;
//! use std::sync::atomic::{AtomicU64, Ordering};
//!
//! let pool = make_pool_scheduler(2).unwrap();
//! let slots: Vec<AtomicU64> = (0..4).map(|_| AtomicU64::new(0)).collect();
//! let work = just(&slots)
//!     .on(pool)
//!     .bulk(4, |i, _resource, slots: &&Vec<AtomicU64>| {
//!         slots[i].fetch_add(1, Ordering::Relaxed);
//!     })
//!     .then(|slots| slots.iter().map(|s| s.load(Ordering::Relaxed)).sum::<u64>());
//! assert_eq!(sync_wait(work).unwrap(), 4);
//! ```
//!
//! A chain is a single owned value. `sync_wait` consumes it, so awaiting a
//! sender twice is rejected at compile time.

use std::fmt;

use thiserror::Error;

use crate::resources::{make_inline_scheduler, ResourceId, Scheduler};

/// Failure of a sender chain, surfaced by [`sync_wait`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExecError {
    #[error("task {index} on resource {resource} failed: {message}")]
    TaskFailed {
        index: usize,
        resource: ResourceId,
        message: String,
    },
    #[error("task {index} on resource {resource} panicked: {message}")]
    TaskPanicked {
        index: usize,
        resource: ResourceId,
        message: String,
    },
}

/// Result type a bulk task function may return.
///
/// Implemented for `()` (infallible tasks) and `Result<(), E>` for any
/// displayable `E`.
pub trait TaskOutcome {
    fn into_outcome(self) -> Result<(), String>;
}

impl TaskOutcome for () {
    fn into_outcome(self) -> Result<(), String> {
        Ok(())
    }
}

impl<E: fmt::Display> TaskOutcome for Result<(), E> {
    fn into_outcome(self) -> Result<(), String> {
        self.map_err(|e| e.to_string())
    }
}

type Stage<'a, T> = Box<dyn FnOnce(Scheduler) -> Result<(T, Scheduler), ExecError> + 'a>;

/// Lazy, one-shot description of work producing a `T`.
///
/// Each stage receives the scheduler the previous stage completed on and
/// reports the scheduler it completed on, which is how [`exec_on`] binds
/// everything chained after it.
#[must_use = "senders do nothing unless passed to sync_wait"]
pub struct Sender<'a, T> {
    stage: Stage<'a, T>,
}

impl<'a, T: 'a> Sender<'a, T> {
    /// Fluent form of [`then`].
    pub fn then<U, F>(self, f: F) -> Sender<'a, U>
    where
        U: 'a,
        F: FnOnce(T) -> U + 'a,
    {
        then(self, f)
    }

    /// Fluent form of [`bulk`].
    pub fn bulk<F, O>(self, n: usize, f: F) -> Sender<'a, T>
    where
        T: Sync,
        F: Fn(usize, ResourceId, &T) -> O + Sync + 'a,
        O: TaskOutcome,
    {
        bulk(self, n, f)
    }

    /// Fluent form of [`exec_on`].
    pub fn on(self, sched: Scheduler) -> Sender<'a, T> {
        exec_on(sched, self)
    }
}

impl<T> fmt::Debug for Sender<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sender").finish_non_exhaustive()
    }
}

/// A sender that completes with `value`.
pub fn just<'a, T: 'a>(value: T) -> Sender<'a, T> {
    Sender {
        stage: Box::new(move |sched| Ok((value, sched))),
    }
}

/// Applies `f` once to the completion value of `s`.
pub fn then<'a, T, U, F>(s: Sender<'a, T>, f: F) -> Sender<'a, U>
where
    T: 'a,
    U: 'a,
    F: FnOnce(T) -> U + 'a,
{
    Sender {
        stage: Box::new(move |sched| {
            let (value, sched) = (s.stage)(sched)?;
            Ok((f(value), sched))
        }),
    }
}

/// Invokes `f(i, resource_id, &payload)` once for every `i < n` on the
/// current scheduler, possibly concurrently, then passes the payload on.
///
/// The task function only gets shared access to the payload. Writes go
/// through interior mutability (atomics, per-resource slots) and must
/// touch only slots the invocation owns.
pub fn bulk<'a, T, F, O>(s: Sender<'a, T>, n: usize, f: F) -> Sender<'a, T>
where
    T: Sync + 'a,
    F: Fn(usize, ResourceId, &T) -> O + Sync + 'a,
    O: TaskOutcome,
{
    Sender {
        stage: Box::new(move |sched| {
            let (value, sched) = (s.stage)(sched)?;
            let payload = &value;
            sched.run_bulk(n, &|i, r| f(i, r, payload).into_outcome())?;
            Ok((value, sched))
        }),
    }
}

/// Runs `s`, and every stage chained after the result, on `sched`.
pub fn exec_on<'a, T: 'a>(sched: Scheduler, s: Sender<'a, T>) -> Sender<'a, T> {
    Sender {
        stage: Box::new(move |_| (s.stage)(sched)),
    }
}

/// Runs the chain to completion on the calling thread's behalf.
///
/// Stages not bound by [`exec_on`] run inline. All task side effects are
/// visible to the caller once this returns.
pub fn sync_wait<T>(s: Sender<'_, T>) -> Result<T, ExecError> {
    (s.stage)(make_inline_scheduler()).map(|(value, _)| value)
}
