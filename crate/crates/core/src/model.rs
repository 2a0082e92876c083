//! Problem data: jobs, models, processing times and the deadline, plus
//! schedule evaluation.
//!
//! Models are indexed from zero. Indices `0..m` are the models on the edge
//! device (ED) in nondecreasing accuracy order, and index `m` is the model on
//! the edge server (ES). Row `m` of the time matrix holds the total time of a
//! job on the ES, communication included.

use std::fmt;

use thiserror::Error;

/// Absolute slack allowed when comparing a load against the deadline.
pub const FEAS_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("NonMonotoneAccuracy: accuracies must be nondecreasing: a[{index}] = {prev} > a[{next_index}] = {next}", next_index = .index + 1)]
    NonMonotoneAccuracy { index: usize, prev: f64, next: f64 },
    #[error("AccuracyOutOfRange: accuracy a[{index}] = {value} is outside [0, 1]")]
    AccuracyOutOfRange { index: usize, value: f64 },
    #[error("NonPositiveTime: processing time p[{model}][{job}] = {value} must be positive and finite")]
    NonPositiveTime { model: usize, job: usize, value: f64 },
    #[error("NonPositiveDeadline: deadline T = {0} must be positive and finite")]
    NonPositiveDeadline(f64),
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    #[error("CommExceedsTotal: communication time c[{job}] = {comm} is not below the ES total time {total}")]
    CommExceedsTotal { job: usize, comm: f64, total: f64 },
    #[error("IndexOutOfRange: schedule entry for job {job} names model {model}, but only {models} models exist")]
    IndexOutOfRange { job: usize, model: usize, models: usize },
}

/// A validated problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    accuracies: Vec<f64>,
    times: Vec<Vec<f64>>,
    comm_times: Option<Vec<f64>>,
    deadline: f64,
}

impl Instance {
    /// Builds an instance, checking every invariant. `times` must be
    /// `(m + 1) x n` where `accuracies.len() == m + 1`.
    pub fn new(
        accuracies: Vec<f64>,
        times: Vec<Vec<f64>>,
        comm_times: Option<Vec<f64>>,
        deadline: f64,
    ) -> Result<Self, ModelError> {
        let inst = Instance { accuracies, times, comm_times, deadline };
        inst.check()?;
        Ok(inst)
    }

    fn check(&self) -> Result<(), ModelError> {
        let models = self.accuracies.len();
        if models < 2 {
            return Err(ModelError::DimensionMismatch(format!(
                "need at least one ED model and the ES model, got {models} accuracies"
            )));
        }
        if self.times.len() != models {
            return Err(ModelError::DimensionMismatch(format!(
                "times has {} rows, expected {models}",
                self.times.len()
            )));
        }
        let n = self.times[0].len();
        if n == 0 {
            return Err(ModelError::DimensionMismatch("instance has no jobs".into()));
        }
        if let Some(row) = self.times.iter().position(|r| r.len() != n) {
            return Err(ModelError::DimensionMismatch(format!(
                "times row {row} has {} entries, expected {n}",
                self.times[row].len()
            )));
        }
        for (index, &value) in self.accuracies.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ModelError::AccuracyOutOfRange { index, value });
            }
        }
        for (index, pair) in self.accuracies.windows(2).enumerate() {
            if pair[0] > pair[1] {
                return Err(ModelError::NonMonotoneAccuracy { index, prev: pair[0], next: pair[1] });
            }
        }
        for (model, row) in self.times.iter().enumerate() {
            for (job, &value) in row.iter().enumerate() {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(ModelError::NonPositiveTime { model, job, value });
                }
            }
        }
        if !(self.deadline > 0.0 && self.deadline.is_finite()) {
            return Err(ModelError::NonPositiveDeadline(self.deadline));
        }
        if let Some(comm) = &self.comm_times {
            if comm.len() != n {
                return Err(ModelError::DimensionMismatch(format!(
                    "comm_times has {} entries, expected {n}",
                    comm.len()
                )));
            }
            let es = &self.times[models - 1];
            for (job, (&c, &total)) in comm.iter().zip(es).enumerate() {
                if !(c >= 0.0 && c < total) {
                    return Err(ModelError::CommExceedsTotal { job, comm: c, total });
                }
            }
        }
        Ok(())
    }

    /// Number of ED models.
    pub fn m(&self) -> usize {
        self.accuracies.len() - 1
    }

    /// Number of jobs.
    pub fn n(&self) -> usize {
        self.times[0].len()
    }

    /// Index of the ES model.
    pub fn es(&self) -> usize {
        self.m()
    }

    pub fn accuracies(&self) -> &[f64] {
        &self.accuracies
    }

    pub fn accuracy(&self, model: usize) -> f64 {
        self.accuracies[model]
    }

    pub fn times(&self) -> &[Vec<f64>] {
        &self.times
    }

    pub fn time(&self, model: usize, job: usize) -> f64 {
        self.times[model][job]
    }

    pub fn comm_times(&self) -> Option<&[f64]> {
        self.comm_times.as_deref()
    }

    pub fn deadline(&self) -> f64 {
        self.deadline
    }

    /// Same jobs and models under a different deadline.
    pub fn with_deadline(&self, deadline: f64) -> Result<Self, ModelError> {
        Instance::new(self.accuracies.clone(), self.times.clone(), self.comm_times.clone(), deadline)
    }

    /// The sub-instance made of the given jobs, in the given order.
    pub fn select_jobs(&self, jobs: &[usize]) -> Result<Self, ModelError> {
        let times = self
            .times
            .iter()
            .map(|row| jobs.iter().map(|&j| row[j]).collect())
            .collect();
        let comm = self.comm_times.as_ref().map(|c| jobs.iter().map(|&j| c[j]).collect());
        Instance::new(self.accuracies.clone(), times, comm, self.deadline)
    }
}

/// Integral assignment of every job to exactly one model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Schedule {
    pub assignment: Vec<usize>,
}

impl Schedule {
    pub fn new(assignment: Vec<usize>) -> Self {
        Schedule { assignment }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Number of jobs on each of the `models` models.
    pub fn counts(&self, models: usize) -> Vec<usize> {
        let mut counts = vec![0; models];
        for &i in &self.assignment {
            counts[i] += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub total_accuracy: f64,
    pub ed_load: f64,
    pub es_load: f64,
    pub makespan: f64,
    pub violates_deadline: bool,
    pub violation_pct: f64,
}

/// Objective value and machine loads of `schedule`.
///
/// The total accuracy is accumulated per model (`sum a_i * count_i`) so that
/// two schedules with the same model counts score bit-identically.
pub fn evaluate(instance: &Instance, schedule: &Schedule) -> Result<Metrics, ModelError> {
    let n = instance.n();
    let models = instance.m() + 1;
    if schedule.len() != n {
        return Err(ModelError::DimensionMismatch(format!(
            "schedule has {} entries, expected {n}",
            schedule.len()
        )));
    }
    let es = instance.es();
    let mut ed_load = 0.0;
    let mut es_load = 0.0;
    for (job, &model) in schedule.assignment.iter().enumerate() {
        if model >= models {
            return Err(ModelError::IndexOutOfRange { job, model, models });
        }
        if model == es {
            es_load += instance.time(model, job);
        } else {
            ed_load += instance.time(model, job);
        }
    }
    let total_accuracy = schedule
        .counts(models)
        .iter()
        .zip(instance.accuracies())
        .map(|(&c, &a)| a * c as f64)
        .sum();
    let makespan = f64::max(ed_load, es_load);
    let deadline = instance.deadline();
    Ok(Metrics {
        total_accuracy,
        ed_load,
        es_load,
        makespan,
        violates_deadline: makespan > deadline + FEAS_EPS,
        violation_pct: 100.0 * f64::max(0.0, makespan - deadline) / deadline,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Amr2,
    Amdp,
    AmdpHetero,
    Greedy,
    Exact,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Amr2 => "amr2",
            Algorithm::Amdp => "amdp",
            Algorithm::AmdpHetero => "amdp-hetero",
            Algorithm::Greedy => "greedy",
            Algorithm::Exact => "exact",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "amr2" => Ok(Algorithm::Amr2),
            "amdp" => Ok(Algorithm::Amdp),
            "amdp-hetero" => Ok(Algorithm::AmdpHetero),
            "greedy" => Ok(Algorithm::Greedy),
            "exact" => Ok(Algorithm::Exact),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

/// What every solver returns.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub schedule: Schedule,
    pub metrics: Metrics,
    /// Jobs split by the LP relaxation (AMR² only, otherwise 0).
    pub fractional_job_count: usize,
    /// Optimal value of the LP relaxation (AMR² only).
    pub lp_objective: Option<f64>,
    pub runtime_ms: f64,
}

impl SolveReport {
    pub(crate) fn finish(
        algorithm: Algorithm,
        instance: &Instance,
        schedule: Schedule,
        started: std::time::Instant,
    ) -> Self {
        let metrics = evaluate(instance, &schedule).expect("solver produced a malformed schedule");
        SolveReport {
            algorithm,
            schedule,
            metrics,
            fractional_job_count: 0,
            lp_objective: None,
            runtime_ms: started.elapsed().as_secs_f64() * 1e3,
        }
    }
}
