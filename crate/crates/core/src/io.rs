//! Instance files (JSON) and run records (CSV).
//!
//! Instance schema:
//!
//! ```json
//! {"m": 1, "n": 2, "accuracies": [0.5, 1.0],
//!  "times": [[0.6, 0.6], [0.6, 0.6]], "comm_times": [0.1, 0.1], "T": 0.9}
//! ```
//!
//! `times` has `m + 1` rows of `n` entries; the last row is the ES total
//! time. `comm_times` is optional. Numbers are written in the shortest form
//! that parses back to the same `f64`.

use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, ModelError, SolveReport};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub m: usize,
    pub n: usize,
    pub accuracies: Vec<f64>,
    pub times: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comm_times: Option<Vec<f64>>,
    #[serde(rename = "T")]
    pub deadline: f64,
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        InstanceFile {
            m: inst.m(),
            n: inst.n(),
            accuracies: inst.accuracies().to_vec(),
            times: inst.times().to_vec(),
            comm_times: inst.comm_times().map(<[f64]>::to_vec),
            deadline: inst.deadline(),
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = ModelError;

    fn try_from(file: InstanceFile) -> Result<Self, Self::Error> {
        if file.accuracies.len() != file.m + 1 {
            return Err(ModelError::DimensionMismatch(format!(
                "m = {} but {} accuracies",
                file.m,
                file.accuracies.len()
            )));
        }
        if file.times.len() != file.m + 1 || file.times.iter().any(|r| r.len() != file.n) {
            return Err(ModelError::DimensionMismatch(format!(
                "times must be {} x {}",
                file.m + 1,
                file.n
            )));
        }
        Instance::new(file.accuracies, file.times, file.comm_times, file.deadline)
    }
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string(&InstanceFile::from(instance)).expect("instance serializes")
}

pub fn instance_from_json(text: &str) -> Result<Instance, IoError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    Ok(Instance::try_from(file)?)
}

pub fn read_instance(path: &Path) -> Result<Instance, IoError> {
    let mut text = String::new();
    File::open(path).and_then(|mut f| f.read_to_string(&mut text)).map_err(io_err(path))?;
    instance_from_json(&text)
}

pub fn write_instance(path: &Path, instance: &Instance) -> Result<(), IoError> {
    let mut text = instance_to_json(instance);
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

/// Column order of every results CSV.
pub const RUN_RECORD_HEADER: [&str; 13] = [
    "algorithm",
    "n",
    "m",
    "T",
    "total_accuracy",
    "lp_objective",
    "makespan",
    "ed_load",
    "es_load",
    "violation_pct",
    "fractional_jobs",
    "runtime_ms",
    "seed",
];

/// One CSV row per solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "T")]
    pub deadline: f64,
    pub total_accuracy: f64,
    pub lp_objective: Option<f64>,
    pub makespan: f64,
    pub ed_load: f64,
    pub es_load: f64,
    pub violation_pct: f64,
    pub fractional_jobs: usize,
    pub runtime_ms: f64,
    pub seed: Option<u64>,
}

impl RunRecord {
    pub fn new(instance: &Instance, report: &SolveReport, seed: Option<u64>) -> Self {
        let m = &report.metrics;
        RunRecord {
            algorithm: report.algorithm.to_string(),
            n: instance.n(),
            m: instance.m(),
            deadline: instance.deadline(),
            total_accuracy: m.total_accuracy,
            lp_objective: report.lp_objective,
            makespan: m.makespan,
            ed_load: m.ed_load,
            es_load: m.es_load,
            violation_pct: m.violation_pct,
            fractional_jobs: report.fractional_job_count,
            runtime_ms: report.runtime_ms,
            seed,
        }
    }
}

/// Writes records to `out`, with a header first when `header` is set.
pub fn write_records<W: Write>(out: W, records: &[RunRecord], header: bool) -> Result<(), IoError> {
    let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| IoError::Io { path: "<csv>".into(), source })?;
    Ok(())
}

/// Appends records to a CSV file, writing the header if the file is new or empty.
pub fn append_records(path: &Path, records: &[RunRecord]) -> Result<(), IoError> {
    let file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err(path))?;
    let empty = file.metadata().map_err(io_err(path))?.len() == 0;
    write_records(file, records, empty)
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<RunRecord>, IoError> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().ne(RUN_RECORD_HEADER.iter().copied()) {
        return Err(IoError::Csv(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected CSV header {headers:?}"),
        ))));
    }
    r.deserialize().map(|row| row.map_err(IoError::from)).collect()
}
