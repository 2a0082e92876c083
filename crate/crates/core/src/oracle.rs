//! Exhaustive solvers used as ground truth.

use std::time::Instant;

use thiserror::Error;

use crate::amdp::{CckpInstance, CckpSelection};
use crate::model::{Algorithm, Instance, Schedule, SolveReport, FEAS_EPS};

/// Default cap on `(m + 1)^n` for [`exact_ilp`].
pub const DEFAULT_STATE_LIMIT: u64 = 10_000_000;
/// Largest item count accepted by [`cckp_brute`].
pub const CCKP_BRUTE_MAX_ITEMS: usize = 24;

/// Objective differences below this are ties.
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("no feasible assignment exists")]
    Infeasible,
    #[error("search space of {size} states exceeds the limit of {limit}")]
    TooLarge { size: f64, limit: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    pub limit: u64,
    /// Branch-and-bound pruning; off means plain enumeration.
    pub prune: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { limit: DEFAULT_STATE_LIMIT, prune: true }
    }
}

struct Search<'a> {
    instance: &'a Instance,
    /// Models in decreasing accuracy, ties by increasing index.
    order: Vec<usize>,
    prune: bool,
    best_value: f64,
    best: Option<Vec<usize>>,
    current: Vec<usize>,
}

impl Search<'_> {
    fn visit(&mut self, depth: usize, value: f64, ed_load: f64, es_load: f64) {
        let inst = self.instance;
        let n = inst.n();
        let t = inst.deadline() + FEAS_EPS;
        if depth == n {
            if ed_load > t || es_load > t {
                return;
            }
            let better = match &self.best {
                None => true,
                Some(b) => {
                    value > self.best_value + TIE_EPS
                        || (value >= self.best_value - TIE_EPS && self.current < *b)
                }
            };
            if better {
                self.best_value = value;
                self.best = Some(self.current.clone());
            }
            return;
        }
        if self.prune {
            if ed_load > t || es_load > t {
                return;
            }
            let bound = value + (n - depth) as f64 * inst.accuracy(inst.es());
            if self.best.is_some() && bound < self.best_value - TIE_EPS {
                return;
            }
        }
        let es = inst.es();
        for idx in 0..self.order.len() {
            let i = self.order[idx];
            let p = inst.time(i, depth);
            let (ed, esl) = if i == es { (ed_load, es_load + p) } else { (ed_load + p, es_load) };
            self.current[depth] = i;
            self.visit(depth + 1, value + inst.accuracy(i), ed, esl);
        }
    }
}

/// Optimal schedule by depth-first enumeration. Among optimal schedules the
/// lexicographically smallest assignment vector is returned.
pub fn exact_ilp(instance: &Instance, options: ExactOptions) -> Result<SolveReport, OracleError> {
    let started = Instant::now();
    let size = ((instance.m() + 1) as f64).powi(instance.n() as i32);
    if size > options.limit as f64 {
        return Err(OracleError::TooLarge { size, limit: options.limit });
    }
    let mut order: Vec<usize> = (0..=instance.m()).collect();
    order.sort_by(|&a, &b| instance.accuracy(b).total_cmp(&instance.accuracy(a)).then(a.cmp(&b)));
    let mut search = Search {
        instance,
        order,
        prune: options.prune,
        best_value: f64::NEG_INFINITY,
        best: None,
        current: vec![0; instance.n()],
    };
    search.visit(0, 0.0, 0.0, 0.0);
    let assignment = search.best.ok_or(OracleError::Infeasible)?;
    Ok(SolveReport::finish(Algorithm::Exact, instance, Schedule::new(assignment), started))
}

/// Whether any schedule meets the deadline. Each job either goes to the ES
/// or to its fastest ED model, so this is a two-machine partition search.
/// Returns `None` when `node_limit` nodes are exhausted without an answer.
pub fn ilp_feasible(instance: &Instance, node_limit: u64) -> Option<bool> {
    let n = instance.n();
    let es = instance.es();
    let t = instance.deadline() + FEAS_EPS;
    let fast: Vec<f64> =
        (0..n).map(|j| (0..es).map(|i| instance.time(i, j)).fold(f64::INFINITY, f64::min)).collect();
    let slow: Vec<f64> = (0..n).map(|j| instance.time(es, j)).collect();
    let mut tail = vec![0.0; n + 1];
    for j in (0..n).rev() {
        tail[j] = tail[j + 1] + fast[j].min(slow[j]);
    }
    let mut nodes = node_limit;
    feasible_from(0, 0.0, 0.0, (&fast, &slow, &tail, t), &mut nodes)
}

fn feasible_from(j: usize, ed: f64, es: f64, c: (&[f64], &[f64], &[f64], f64), nodes: &mut u64) -> Option<bool> {
    let (fast, slow, tail, t) = c;
    if ed > t || es > t || ed + es + tail[j] > 2.0 * t {
        return Some(false);
    }
    if j == fast.len() {
        return Some(true);
    }
    if *nodes == 0 {
        return None;
    }
    *nodes -= 1;
    let mut unknown = false;
    for (e, s) in [(ed + fast[j], es), (ed, es + slow[j])] {
        match feasible_from(j + 1, e, s, c, nodes) {
            Some(true) => return Some(true),
            Some(false) => {}
            None => unknown = true,
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}

/// Exhaustive CCKP: best subset of exactly `cardinality` items within capacity.
pub fn cckp_brute(cckp: &CckpInstance) -> Result<CckpSelection, OracleError> {
    let items = cckp.len();
    if items > CCKP_BRUTE_MAX_ITEMS {
        return Err(OracleError::TooLarge { size: 2f64.powi(items as i32), limit: 1 << CCKP_BRUTE_MAX_ITEMS });
    }
    let card = cckp.cardinality;
    if card > items {
        return Err(OracleError::Infeasible);
    }
    let mut best: Option<CckpSelection> = None;
    let mut chosen = Vec::with_capacity(card);
    fn rec(
        cckp: &CckpInstance,
        start: usize,
        weight: u64,
        value: f64,
        chosen: &mut Vec<usize>,
        best: &mut Option<CckpSelection>,
    ) {
        if weight > cckp.capacity {
            return;
        }
        if chosen.len() == cckp.cardinality {
            if best.as_ref().map_or(true, |b| value > b.value) {
                *best = Some(CckpSelection { items: chosen.clone(), value });
            }
            return;
        }
        let need = cckp.cardinality - chosen.len();
        for r in start..=cckp.len() - need {
            chosen.push(r);
            rec(cckp, r + 1, weight + cckp.weights[r], value + cckp.values[r], chosen, best);
            chosen.pop();
        }
    }
    rec(cckp, 0, 0, 0.0, &mut chosen, &mut best);
    best.ok_or(OracleError::Infeasible)
}
