//! Network traffic-matrix analytics on a composable sender/scheduler
//! execution model.
//!
//! The pipeline: synthetic packets are anonymized and cut into windows,
//! each window becomes a sparse traffic matrix, the matrix is flattened
//! into edge/weight/degree containers, and six aggregate measures are
//! reduced from those containers by bulk stages pushed onto a group of
//! execution resources, one batch at a time.
//!
//! * [`exec`]: lazy senders (`just`, `then`, `bulk`, `exec_on`, `sync_wait`)
//! * [`resources`]: inline, pool and multi-resource group schedulers
//! * [`partition`]: even device split and per-device batching
//! * [`traffic`]: packets, anonymization, CSR matrices, flat containers, files
//! * [`analytics`]: batched sum/max reductions and the aggregate report
//! * [`bench`]: dataset generation and the timing harness

pub mod analytics;
pub mod bench;
pub mod exec;
pub mod partition;
pub mod resources;
pub mod traffic;

pub use analytics::{analyze_dataset, analyze_matrix, oracle_analyze, AggregateReport, DatasetReport};
pub use exec::{bulk, exec_on, just, sync_wait, then, ExecError, Sender};
pub use partition::BatchCount;
pub use resources::Scheduler;
