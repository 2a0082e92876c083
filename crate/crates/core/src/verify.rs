//! Seeded property suites behind `edgesched verify`, and the instance corpora
//! they draw from.
//!
//! Everything here is deterministic in the seed count: the per-case CSV
//! carries no timings, so repeated runs are byte-identical.

use serde::Serialize;

use crate::amdp;
use crate::amr2::run_amr2;
use crate::gen::{generate, GenParams, Profile, Stream, DEFAULT_GRID};
use crate::model::{Instance, FEAS_EPS};
use crate::oracle::{exact_ilp, ilp_feasible, ExactOptions};
use crate::simplex::{build_relaxation, simplex_solve, LpStatus};

/// Slack on every bound checked by the suites.
pub const BOUND_EPS: f64 = 1e-9;

const FEASIBILITY_NODES: u64 = 1_000_000;

const AMR2_CORPUS_SALT: u64 = 0x5eed_a3e2_0000_0001;
const IDENTICAL_CORPUS_SALT: u64 = 0x5eed_a3d9_0000_0002;

pub fn lp_is_feasible(instance: &Instance) -> bool {
    matches!(simplex_solve(&build_relaxation(instance)), Ok(s) if s.status == LpStatus::Optimal)
}

/// Case `index` of the AMR² corpus: `monotone_random` with `n` in `2..=30`,
/// `m` in `1..=5` and `T` a random fraction (0.15 to 1.2) of the time to run
/// every job on model 0. Redrawn until some integral schedule meets `T`
/// (which also makes the LP relaxation feasible).
pub fn amr2_corpus_instance(index: u64) -> Instance {
    let mut meta = Stream::new(index ^ AMR2_CORPUS_SALT);
    loop {
        let n = meta.int(2, 30);
        let m = meta.int(1, 5);
        let factor = meta.range(0.15, 1.2);
        let seed = meta.next_u64();
        let draft = generate(&GenParams::new(Profile::MonotoneRandom, n, m, 1.0, seed))
            .expect("corpus parameters are valid");
        let deadline = factor * draft.times()[0].iter().sum::<f64>();
        let inst = draft.with_deadline(deadline).expect("deadline is positive");
        if ilp_feasible(&inst, FEASIBILITY_NODES) == Some(true) {
            return inst;
        }
    }
}

/// Case `index` of the identical-jobs corpus: `identical_random` on the
/// 1 ms grid with `n` in `1..=8`, `m` in `1..=3` and a grid-aligned `T`.
/// Redrawn until the exact oracle finds a feasible schedule.
pub fn identical_corpus_instance(index: u64) -> Instance {
    let mut meta = Stream::new(index ^ IDENTICAL_CORPUS_SALT);
    loop {
        let n = meta.int(1, 8);
        let m = meta.int(1, 3);
        let factor = meta.range(0.25, 1.0);
        let seed = meta.next_u64();
        let draft = generate(&GenParams::new(Profile::IdenticalRandom, n, m, 1.0, seed))
            .expect("corpus parameters are valid");
        let mean = 0.5 * (draft.time(0, 0) + draft.time(m, 0));
        let steps = (factor * n as f64 * mean / DEFAULT_GRID).ceil().max(1.0);
        let inst = draft.with_deadline(steps * DEFAULT_GRID).expect("deadline is positive");
        if exact_ilp(&inst, ExactOptions::default()).is_ok() {
            return inst;
        }
    }
}

/// One checked case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub suite: &'static str,
    pub case: u64,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "T")]
    pub deadline: f64,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub name: &'static str,
    pub description: &'static str,
    pub passed: usize,
    pub total: usize,
}

impl std::fmt::Display for SuiteSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}/{} {}", self.name, self.passed, self.total, self.description)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub suites: Vec<SuiteSummary>,
    pub rows: Vec<VerifyRow>,
}

impl VerifyOutcome {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed == s.total)
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).expect("in-memory CSV write");
        }
        w.into_inner().expect("in-memory CSV flush")
    }
}

fn row(suite: &'static str, case: u64, inst: &Instance, value: f64, bound: f64, pass: bool) -> VerifyRow {
    VerifyRow { suite, case, n: inst.n(), m: inst.m(), deadline: inst.deadline(), value, bound, pass }
}

/// Runs the four suites on cases `0..seeds` of each corpus:
/// at most two split jobs, makespan within `2T`, LP gap within
/// `2(a_es - a_0)`, and AMDP matching the exact optimum.
pub fn run_verify(seeds: u64) -> VerifyOutcome {
    use rayon::prelude::*;

    let amr2_rows: Vec<[VerifyRow; 3]> = (0..seeds)
        .into_par_iter()
        .map(|case| {
            let inst = amr2_corpus_instance(case);
            let t = inst.deadline();
            let spread = inst.accuracy(inst.es()) - inst.accuracy(0);
            match run_amr2(&inst) {
                Ok(r) => {
                    let lp = r.lp_objective.unwrap_or(f64::NAN);
                    let frac = r.fractional_job_count as f64;
                    let gap = lp - r.metrics.total_accuracy;
                    [
                        row("lemma1", case, &inst, frac, 2.0, r.fractional_job_count <= 2),
                        row("theorem1", case, &inst, r.metrics.makespan, 2.0 * t, r.metrics.makespan <= 2.0 * t + BOUND_EPS),
                        row("theorem2", case, &inst, gap, 2.0 * spread, gap <= 2.0 * spread + BOUND_EPS),
                    ]
                }
                Err(_) => [
                    row("lemma1", case, &inst, f64::NAN, 2.0, false),
                    row("theorem1", case, &inst, f64::NAN, 2.0 * t, false),
                    row("theorem2", case, &inst, f64::NAN, 2.0 * spread, false),
                ],
            }
        })
        .collect();

    let amdp_rows: Vec<VerifyRow> = (0..seeds)
        .into_par_iter()
        .map(|case| {
            let inst = identical_corpus_instance(case);
            let exact = exact_ilp(&inst, ExactOptions::default()).expect("corpus instances are feasible");
            match amdp::run_amdp(&inst, amdp::DEFAULT_DELTA) {
                Ok(r) => {
                    let pass = r.metrics.total_accuracy == exact.metrics.total_accuracy
                        && r.metrics.makespan <= inst.deadline() + FEAS_EPS;
                    row("amdp", case, &inst, r.metrics.total_accuracy, exact.metrics.total_accuracy, pass)
                }
                Err(_) => row("amdp", case, &inst, f64::NAN, exact.metrics.total_accuracy, false),
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(4 * seeds as usize);
    for k in 0..3 {
        rows.extend(amr2_rows.iter().map(|r| r[k].clone()));
    }
    rows.extend(amdp_rows);

    let summary = |name, description| {
        let mine: Vec<&VerifyRow> = rows.iter().filter(|r| r.suite == name).collect();
        SuiteSummary { name, description, passed: mine.iter().filter(|r| r.pass).count(), total: mine.len() }
    };
    let suites = vec![
        summary("lemma1", "≤2 fractional"),
        summary("theorem1", "makespan ≤ 2T"),
        summary("theorem2", "LP gap ≤ 2(a_es - a_0)"),
        summary("amdp", "equal to exact optimum"),
    ];
    VerifyOutcome { suites, rows }
}
