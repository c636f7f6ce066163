//! Dataset generation and the timing harness behind the `netsense` CLI.
//!
//! A dataset directory holds one matrix file per window
//! (`window-000000.mtx`, ...) and a `manifest.json`:
//!
//! ```json
//! {"format":1,"packets":10,"valid_packets":10,"window_size":4,"windows":3,
//!  "seed":1,"address_space":65536,"anonymization_key":1,
//!  "files":["window-000000.mtx","window-000001.mtx","window-000002.mtx"]}
//! ```
//!
//! Timing follows two boundaries. *Analysis time* covers only the
//! analytics over already-built containers. *End-to-end time* runs from a
//! caller-supplied start instant (process start for the CLI) through
//! loading, scheduler setup and analysis to the point the results are
//! ready to emit.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{analyze_dataset, DatasetReport};
use crate::partition::{BatchCount, PartitionError};
use crate::resources::{default_workers_per_resource, make_inline_scheduler, make_uniform_group, ResourceError, Scheduler};
use crate::traffic::{
    anonymize, build_matrices, read_matrix, to_flat, write_matrix, FlatContainers, MatrixError, MatrixIoError,
    PacketGenerator, TrafficError, TrafficMatrix,
};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RESULTS_FILE: &str = "results.jsonl";
pub const DEFAULT_WINDOW: usize = 1 << 17;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Matrix(#[from] MatrixIoError),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(#[from] MatrixError),
    #[error(transparent)]
    Traffic(#[from] TrafficError),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("{path}: malformed manifest: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}: no matrix files found")]
    NoMatrices(PathBuf),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub packets: u64,
    pub valid_packets: u64,
    pub window_size: usize,
    pub windows: usize,
    pub seed: u64,
    pub address_space: u32,
    pub anonymization_key: u64,
    pub files: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerateParams {
    pub packets: usize,
    pub address_space: u32,
    pub seed: u64,
    pub window_size: usize,
    /// Defaults to `seed` when `None`.
    pub anonymization_key: Option<u64>,
    pub invalid_fraction: f64,
}

impl Default for GenerateParams {
    fn default() -> Self {
        Self {
            packets: 1 << 20,
            address_space: 1 << 16,
            seed: 0,
            window_size: DEFAULT_WINDOW,
            anonymization_key: None,
            invalid_fraction: 0.0,
        }
    }
}

impl GenerateParams {
    /// Generated, anonymized and windowed matrices, without touching disk.
    pub fn build(&self) -> Result<Vec<TrafficMatrix>, BenchError> {
        if self.window_size == 0 {
            return Err(BenchError::InvalidParameter("window size must be at least 1".into()));
        }
        let packets: Vec<_> = PacketGenerator::new(self.packets, self.address_space, self.seed)?
            .with_invalid_fraction(self.invalid_fraction)?
            .collect();
        let (anonymized, _) = anonymize(&packets, self.anonymization_key.unwrap_or(self.seed));
        Ok(build_matrices(&anonymized, self.window_size)?)
    }
}

pub fn matrix_file_name(window: usize) -> String {
    format!("window-{window:06}.mtx")
}

/// Writes one matrix file per window plus the manifest into `out_dir`.
pub fn generate_dataset(params: &GenerateParams, out_dir: &Path) -> Result<Manifest, BenchError> {
    let matrices = params.build()?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut files = Vec::with_capacity(matrices.len());
    for (t, m) in matrices.iter().enumerate() {
        let name = matrix_file_name(t);
        write_matrix(m, out_dir.join(&name))?;
        files.push(name);
    }
    let manifest = Manifest {
        format: 1,
        packets: params.packets as u64,
        valid_packets: matrices.iter().map(TrafficMatrix::packet_count).sum(),
        window_size: params.window_size,
        windows: matrices.len(),
        seed: params.seed,
        address_space: params.address_space,
        anonymization_key: params.anonymization_key.unwrap_or(params.seed),
        files,
    };
    let path = out_dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(io_err(&path))?;
    Ok(manifest)
}

/// Matrices of a dataset directory, in window order.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub manifest: Option<Manifest>,
    pub matrices: Vec<TrafficMatrix>,
}

impl Dataset {
    /// Packet count used for rate computation: the manifest's raw count when
    /// present, else the valid packets stored in the matrices.
    pub fn packet_count(&self) -> u64 {
        match &self.manifest {
            Some(m) => m.packets,
            None => self.matrices.iter().map(TrafficMatrix::packet_count).sum(),
        }
    }

    pub fn flat(&self) -> Result<Vec<FlatContainers>, BenchError> {
        Ok(self.matrices.iter().map(to_flat).collect::<Result<_, _>>()?)
    }
}

/// Loads a dataset directory. With a manifest the listed files are read in
/// order; without one every `*.mtx` file is read in name order.
pub fn load_dataset(dir: &Path) -> Result<Dataset, BenchError> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest = match fs::read_to_string(&manifest_path) {
        Ok(text) => Some(serde_json::from_str::<Manifest>(&text).map_err(|source| BenchError::Manifest {
            path: manifest_path.clone(),
            source,
        })?),
        Err(e) if e.kind() == io::ErrorKind::NotFound => None,
        Err(e) => return Err(io_err(&manifest_path)(e)),
    };
    let files: Vec<PathBuf> = match &manifest {
        Some(m) => m.files.iter().map(|f| dir.join(f)).collect(),
        None => {
            let mut found: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(io_err(dir))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "mtx"))
                .collect();
            found.sort();
            found
        }
    };
    if files.is_empty() {
        return Err(BenchError::NoMatrices(dir.to_path_buf()));
    }
    let matrices = files.iter().map(read_matrix).collect::<Result<Vec<_>, _>>()?;
    Ok(Dataset { manifest, matrices })
}

/// Where analytics run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    /// `0` selects the inline scheduler; otherwise a group of this many pools.
    pub resources: usize,
    pub workers_per_resource: usize,
    pub batches: usize,
}

impl RunConfig {
    pub fn group(resources: usize, workers_per_resource: Option<usize>, batches: usize) -> Self {
        Self {
            resources,
            workers_per_resource: workers_per_resource.unwrap_or_else(|| default_workers_per_resource(resources)),
            batches,
        }
    }

    pub fn inline(batches: usize) -> Self {
        Self {
            resources: 0,
            workers_per_resource: 1,
            batches,
        }
    }

    pub fn scheduler(&self) -> Result<Scheduler, BenchError> {
        if self.resources == 0 {
            Ok(make_inline_scheduler())
        } else {
            Ok(make_uniform_group(self.resources, Some(self.workers_per_resource))?)
        }
    }

    pub fn batch_count(&self) -> Result<BatchCount, BenchError> {
        Ok(BatchCount::new(self.batches)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub resources: usize,
    pub workers_per_resource: usize,
    pub batches: usize,
    pub window: Option<usize>,
    pub packets: Option<u64>,
    pub seed: Option<u64>,
}

impl BenchConfig {
    fn new(run: &RunConfig, manifest: Option<&Manifest>) -> Self {
        Self {
            resources: run.resources,
            workers_per_resource: run.workers_per_resource,
            batches: run.batches,
            window: manifest.map(|m| m.window_size),
            packets: manifest.map(|m| m.packets),
            seed: manifest.map(|m| m.seed),
        }
    }
}

/// Timings of one run (or the best of several) in seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub analysis_time: f64,
    pub end_to_end_time: f64,
    pub packet_count: u64,
    pub packet_rate: f64,
    pub config: BenchConfig,
}

/// Packets per second of end-to-end time.
pub fn packet_rate(packet_count: u64, end_to_end_secs: f64) -> f64 {
    packet_count as f64 / end_to_end_secs
}

impl BenchResult {
    pub fn new(analysis: Duration, end_to_end: Duration, packet_count: u64, config: BenchConfig) -> Self {
        let end_to_end_time = end_to_end.as_secs_f64();
        Self {
            analysis_time: analysis.as_secs_f64(),
            end_to_end_time,
            packet_count,
            packet_rate: packet_rate(packet_count, end_to_end_time),
            config,
        }
    }

    /// Analysis fits inside end-to-end, and the stored rate is exactly the
    /// one recomputed from count and end-to-end time.
    pub fn is_consistent(&self) -> bool {
        self.analysis_time <= self.end_to_end_time
            && self.packet_rate.to_bits() == packet_rate(self.packet_count, self.end_to_end_time).to_bits()
    }
}

/// Runs [`analyze_dataset`] and measures only that call.
pub fn timed_analysis(flats: &[FlatContainers], sched: &Scheduler, batches: BatchCount) -> (DatasetReport, Duration) {
    let started = Instant::now();
    let report = analyze_dataset(flats, sched, batches);
    (report, started.elapsed())
}

#[derive(Clone, Debug)]
pub struct AnalyzeOutcome {
    pub report: DatasetReport,
    pub result: BenchResult,
}

/// Loads `dir`, analyzes it under `run` and times both boundaries.
pub fn analyze_dir(dir: &Path, run: &RunConfig, started: Instant) -> Result<AnalyzeOutcome, BenchError> {
    let batches = run.batch_count()?;
    let dataset = load_dataset(dir)?;
    let flats = dataset.flat()?;
    let sched = run.scheduler()?;
    let (report, analysis) = timed_analysis(&flats, &sched, batches);
    let result = BenchResult::new(
        analysis,
        started.elapsed(),
        dataset.packet_count(),
        BenchConfig::new(run, dataset.manifest.as_ref()),
    );
    Ok(AnalyzeOutcome { report, result })
}

/// Best-of-`repeats` timings for every `(resources, batches)` cell, in
/// `resources`-major order. Each repeat reloads the directory.
pub fn bench_dir(
    dir: &Path,
    resources: &[usize],
    batches: &[usize],
    workers_per_resource: Option<usize>,
    repeats: usize,
) -> Result<Vec<BenchResult>, BenchError> {
    if repeats == 0 {
        return Err(BenchError::InvalidParameter("repeats must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(resources.len() * batches.len());
    for &r in resources {
        for &b in batches {
            let run = RunConfig::group(r, workers_per_resource, b);
            let runs = (0..repeats)
                .map(|_| analyze_dir(dir, &run, Instant::now()).map(|o| o.result))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(best_of(runs).expect("repeats is nonzero"));
        }
    }
    Ok(rows)
}

/// Minimum of each timing across runs of one cell, with the rate
/// recomputed from the best end-to-end time.
pub fn best_of(runs: Vec<BenchResult>) -> Option<BenchResult> {
    let first = runs.first()?.clone();
    let analysis = runs.iter().map(|r| r.analysis_time).fold(f64::INFINITY, f64::min);
    let end_to_end = runs.iter().map(|r| r.end_to_end_time).fold(f64::INFINITY, f64::min);
    Some(BenchResult {
        analysis_time: analysis,
        end_to_end_time: end_to_end,
        packet_rate: packet_rate(first.packet_count, end_to_end),
        ..first
    })
}
