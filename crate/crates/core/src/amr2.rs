//! AMR²: solve the LP relaxation, keep its integral part and round the (at
//! most two) split jobs.
//!
//! The split jobs are placed with a fresh budget `T` on each machine, which
//! is why the final makespan can reach `2T`.

use std::time::Instant;

use thiserror::Error;

use crate::model::{Algorithm, Instance, Schedule, SolveReport};
use crate::simplex::{self, build_relaxation, column, fractional_jobs, simplex_solve, LpStatus, SimplexError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Amr2Error {
    #[error("instance is infeasible: {0}")]
    InfeasibleInstance(String),
    #[error("internal solver error: {0}")]
    Internal(String),
}

impl From<SimplexError> for Amr2Error {
    fn from(e: SimplexError) -> Self {
        Amr2Error::Internal(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no assignment of jobs {job1} and {job2} fits the budget")]
pub struct SubIlpInfeasible {
    pub job1: usize,
    pub job2: usize,
}

/// Placement of the two split jobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubIlpAssignment {
    pub model_for_job1: usize,
    pub model_for_job2: usize,
    pub accuracy: f64,
}

/// Most accurate model among `models` that runs `job` within the deadline.
/// Ties go to the smallest index.
fn best_fitting(instance: &Instance, job: usize, models: std::ops::Range<usize>) -> Option<usize> {
    let t = instance.deadline();
    let mut best: Option<usize> = None;
    for i in models {
        if instance.time(i, job) <= t && best.map_or(true, |b| instance.accuracy(i) > instance.accuracy(b)) {
            best = Some(i);
        }
    }
    best
}

/// Optimal placement of two jobs when each machine has budget `T`.
///
/// Case analysis:
/// 1. some ES time fits: both go to the ES if they fit together; otherwise the
///    job with the better ED option stays on the ED and the other is
///    offloaded (job 1 stays on ties; a job whose ES time exceeds `T` is never
///    the one offloaded).
/// 2. neither ES time fits: both run on the ED, choosing the pair of models
///    with the highest combined accuracy whose times sum to at most `T`.
pub fn solve_sub_ilp(
    instance: &Instance,
    job1: usize,
    job2: usize,
) -> Result<SubIlpAssignment, SubIlpInfeasible> {
    assert_ne!(job1, job2, "sub-ILP needs two distinct jobs");
    let t = instance.deadline();
    let es = instance.es();
    let infeasible = SubIlpInfeasible { job1, job2 };
    let es1 = instance.time(es, job1);
    let es2 = instance.time(es, job2);
    let acc = |i: usize| instance.accuracy(i);

    if es1 <= t || es2 <= t {
        if es1 + es2 <= t {
            return Ok(SubIlpAssignment { model_for_job1: es, model_for_job2: es, accuracy: 2.0 * acc(es) });
        }
        let ed1 = best_fitting(instance, job1, 0..es);
        let ed2 = best_fitting(instance, job2, 0..es);
        let value = |b: Option<usize>| b.map_or(f64::NEG_INFINITY, acc);
        let mut keep_job1_on_ed = value(ed1) >= value(ed2);
        if keep_job1_on_ed && es2 > t {
            keep_job1_on_ed = false;
        } else if !keep_job1_on_ed && es1 > t {
            keep_job1_on_ed = true;
        }
        return if keep_job1_on_ed {
            let i = ed1.ok_or(infeasible)?;
            if es2 > t {
                return Err(infeasible);
            }
            Ok(SubIlpAssignment { model_for_job1: i, model_for_job2: es, accuracy: acc(i) + acc(es) })
        } else {
            let i = ed2.ok_or(infeasible)?;
            if es1 > t {
                return Err(infeasible);
            }
            Ok(SubIlpAssignment { model_for_job1: es, model_for_job2: i, accuracy: acc(es) + acc(i) })
        };
    }

    let mut best: Option<SubIlpAssignment> = None;
    for i1 in 0..es {
        for i2 in 0..es {
            if instance.time(i1, job1) + instance.time(i2, job2) <= t {
                let a = acc(i1) + acc(i2);
                if best.map_or(true, |b| a > b.accuracy) {
                    best = Some(SubIlpAssignment { model_for_job1: i1, model_for_job2: i2, accuracy: a });
                }
            }
        }
    }
    best.ok_or(infeasible)
}

/// Runs AMR² on `instance`.
pub fn run_amr2(instance: &Instance) -> Result<SolveReport, Amr2Error> {
    let started = Instant::now();
    let n = instance.n();
    let models = instance.m() + 1;

    let lp = build_relaxation(instance);
    let solution = simplex_solve(&lp)?;
    match solution.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(Amr2Error::InfeasibleInstance("LP relaxation is infeasible".into()))
        }
        LpStatus::Unbounded => return Err(Amr2Error::Internal("LP relaxation reported unbounded".into())),
    }

    let fractional: Vec<usize> = fractional_jobs(&solution, instance).into_iter().collect();
    let mut assignment = vec![usize::MAX; n];
    for j in (0..n).filter(|j| !fractional.contains(j)) {
        assignment[j] = (0..models)
            .find(|&i| solution.values[column(i, j, n)] >= 1.0 - simplex::EPS)
            .ok_or_else(|| Amr2Error::Internal(format!("job {j} is neither integral nor fractional")))?;
    }

    match fractional[..] {
        [] => {}
        [job] => {
            assignment[job] = best_fitting(instance, job, 0..models).ok_or_else(|| {
                Amr2Error::InfeasibleInstance(format!("no model runs job {job} within the deadline"))
            })?;
        }
        [job1, job2] => {
            let sub = solve_sub_ilp(instance, job1, job2)
                .map_err(|e| Amr2Error::InfeasibleInstance(e.to_string()))?;
            assignment[job1] = sub.model_for_job1;
            assignment[job2] = sub.model_for_job2;
        }
        _ => {
            return Err(Amr2Error::Internal(format!(
                "basic solution splits {} jobs, expected at most two",
                fractional.len()
            )))
        }
    }

    let mut report = SolveReport::finish(Algorithm::Amr2, instance, Schedule::new(assignment), started);
    report.fractional_job_count = fractional.len();
    report.lp_objective = Some(solution.objective);
    Ok(report)
}
