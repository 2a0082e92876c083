//! AMDP: optimal schedules for identical jobs.
//!
//! With identical jobs the ES should take as many jobs as fit, `n_c =
//! floor(T / p_es)`. The remaining `n_l` jobs go to the ED, which is a
//! cardinality-constrained knapsack (CCKP): pick exactly `n_l` items out of
//! `n_l` copies of each ED model, maximizing accuracy under the time budget.
//! The knapsack is solved by dynamic programming on an integer time grid of
//! resolution `delta`.

use std::time::Instant;

use thiserror::Error;

use crate::model::{Algorithm, Instance, Schedule, SolveReport};

/// Default grid resolution in seconds.
pub const DEFAULT_DELTA: f64 = 1e-3;

/// Relative distance to the nearest grid point below which a value is treated
/// as lying on the grid.
const GRID_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AmdpError {
    #[error("jobs are not identical: model {model} times spread by {spread} s (tolerance {tolerance} s)")]
    NotIdenticalJobs { model: usize, spread: f64, tolerance: f64 },
    #[error("ES compute times are not identical: spread {spread} s (tolerance {tolerance} s)")]
    NotIdenticalEsCompute { spread: f64, tolerance: f64 },
    #[error("instance has no communication times")]
    MissingCommTimes,
    #[error("grid resolution {0} must be positive and finite")]
    InvalidDelta(f64),
    #[error("no selection of {cardinality} ED jobs fits the budget of {capacity} units")]
    Infeasible { cardinality: usize, capacity: u64 },
}

fn units_ceil(seconds: f64, delta: f64) -> u64 {
    let q = seconds / delta;
    let r = q.round();
    let units = if (q - r).abs() <= GRID_SNAP * r.max(1.0) { r } else { q.ceil() };
    (units as u64).max(1)
}

fn units_floor(seconds: f64, delta: f64) -> u64 {
    let q = seconds / delta;
    let r = q.round();
    let units = if (q - r).abs() <= GRID_SNAP * r.max(1.0) { r } else { q.floor() };
    units.max(0.0) as u64
}

/// Times on the integer grid. Job times are rounded up and the budget down,
/// so a schedule that fits in units also fits in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedTimes {
    pub delta: f64,
    pub ed_units: Vec<u64>,
    pub es_units: u64,
    pub budget_units: u64,
}

impl QuantizedTimes {
    pub fn new(ed_times: &[f64], es_time: f64, deadline: f64, delta: f64) -> Result<Self, AmdpError> {
        check_delta(delta)?;
        Ok(QuantizedTimes {
            delta,
            ed_units: ed_times.iter().map(|&p| units_ceil(p, delta)).collect(),
            es_units: units_ceil(es_time, delta),
            budget_units: units_floor(deadline, delta),
        })
    }
}

fn check_delta(delta: f64) -> Result<(), AmdpError> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(AmdpError::InvalidDelta(delta))
    }
}

/// Number of identical jobs the ES can take: `floor(T / p_es)` on the grid.
pub fn es_count(deadline: f64, es_time: f64, delta: f64) -> Result<usize, AmdpError> {
    check_delta(delta)?;
    Ok((units_floor(deadline, delta) / units_ceil(es_time, delta)) as usize)
}

/// Knapsack items: `block_len` consecutive copies of each ED model.
#[derive(Debug, Clone, PartialEq)]
pub struct CckpInstance {
    pub values: Vec<f64>,
    pub weights: Vec<u64>,
    pub capacity: u64,
    pub cardinality: usize,
    pub block_len: usize,
}

fn expand<T: Copy>(xs: &[T], copies: usize) -> Vec<T> {
    xs.iter().flat_map(|&x| std::iter::repeat(x).take(copies)).collect()
}

impl CckpInstance {
    /// Expands one item per (model, job) pair, model-major.
    pub fn from_models(values: &[f64], weights: &[u64], copies: usize, capacity: u64) -> Self {
        assert_eq!(values.len(), weights.len());
        CckpInstance {
            values: expand(values, copies),
            weights: expand(weights, copies),
            capacity,
            cardinality: copies,
            block_len: copies,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// ED model an item is a copy of.
    pub fn model_of(&self, item: usize) -> usize {
        item / self.block_len.max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CckpSelection {
    /// Chosen item indices, increasing.
    pub items: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CckpBuild {
    /// Every job fits on the ES.
    AllToEs { n_c: usize },
    Knapsack { n_c: usize, cckp: CckpInstance },
}

/// Per-model representative time (max over jobs), rejecting spreads above
/// `delta / 2`.
fn identical_times(instance: &Instance, models: std::ops::Range<usize>, delta: f64) -> Result<Vec<f64>, AmdpError> {
    let tolerance = delta / 2.0;
    models
        .map(|i| {
            let row = &instance.times()[i];
            let (lo, hi) = row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)));
            if hi - lo > tolerance {
                Err(AmdpError::NotIdenticalJobs { model: i, spread: hi - lo, tolerance })
            } else {
                Ok(hi)
            }
        })
        .collect()
}

/// Reduces an identical-jobs instance to a CCKP over the jobs left after
/// filling the ES.
pub fn build_cckp(instance: &Instance, delta: f64) -> Result<CckpBuild, AmdpError> {
    check_delta(delta)?;
    let m = instance.m();
    let reps = identical_times(instance, 0..m + 1, delta)?;
    let q = QuantizedTimes::new(&reps[..m], reps[m], instance.deadline(), delta)?;
    let n = instance.n();
    let n_c = ((q.budget_units / q.es_units) as usize).min(n);
    let n_l = n - n_c;
    if n_l == 0 {
        return Ok(CckpBuild::AllToEs { n_c });
    }
    let cckp = CckpInstance::from_models(&instance.accuracies()[..m], &q.ed_units, n_l, q.budget_units);
    Ok(CckpBuild::Knapsack { n_c, cckp })
}

/// `y[tau][k]` after all items: best value using exactly `k` items of total
/// weight at most `tau`, `NEG_INFINITY` where unreachable.
#[derive(Debug, Clone, PartialEq)]
pub struct DpTable {
    pub capacity: u64,
    pub cardinality: usize,
    y: Vec<f64>,
}

impl DpTable {
    pub fn get(&self, tau: u64, k: usize) -> f64 {
        self.y[tau as usize * (self.cardinality + 1) + k]
    }
}

impl DpTable {
    fn empty(capacity: u64, cardinality: usize) -> Self {
        let width = cardinality + 1;
        let mut y = vec![f64::NEG_INFINITY; (capacity as usize + 1) * width];
        for tau in 0..=capacity as usize {
            y[tau * width] = 0.0;
        }
        DpTable { capacity, cardinality, y }
    }
}

/// Item-by-item recursion `y_s(tau, k) = max(y_{s-1}(tau, k), y_{s-1}(tau - w_s, k - 1) + a_s)`
/// on one table updated in place (tau and k descending). `hook` sees the
/// table after every item.
fn run_item_dp(cckp: &CckpInstance, mut hook: impl FnMut(&DpTable)) -> DpTable {
    let cap = cckp.capacity as usize;
    let width = cckp.cardinality + 1;
    let mut table = DpTable::empty(cckp.capacity, cckp.cardinality);
    for (&a, &w) in cckp.values.iter().zip(&cckp.weights) {
        let w = w as usize;
        if w <= cap {
            for tau in (w..=cap).rev() {
                for k in (1..width).rev() {
                    let cand = table.y[(tau - w) * width + k - 1] + a;
                    if cand > table.y[tau * width + k] {
                        table.y[tau * width + k] = cand;
                    }
                }
            }
        }
        hook(&table);
    }
    table
}

/// Maximal runs of consecutive identical items as `(start, len)`.
fn item_runs(cckp: &CckpInstance) -> Vec<(usize, usize)> {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for s in 0..cckp.len() {
        match runs.last_mut() {
            Some((start, len))
                if cckp.values[*start] == cckp.values[s] && cckp.weights[*start] == cckp.weights[s] =>
            {
                *len += 1
            }
            _ => runs.push((s, 1)),
        }
    }
    runs
}

/// Applies a run of `len` identical items `(a, w)` to `old` at once. Taking
/// `c` copies moves a state along the diagonal `(tau - c w, k - c)`, so each
/// diagonal is a sliding-window maximum over `c <= len`. Returns the new
/// table and the chosen `c` per state; among equal values the smallest `c`
/// wins, which matches the item recursion preferring earlier items.
fn apply_run(old: &DpTable, a: f64, w: usize, len: usize) -> (DpTable, Vec<u32>) {
    use std::collections::VecDeque;
    let cap = old.capacity as usize;
    let card = old.cardinality;
    let width = card + 1;
    let mut new = old.clone();
    let mut take = vec![0u32; old.y.len()];
    // Diagonal of (tau, k) is tau - k w, offset to be non-negative. Rows are
    // visited in increasing tau, so each diagonal is walked in increasing k.
    let offset = card * w;
    let diagonals = cap + 1 + offset;
    if len >= card {
        // The window never binds: a running maximum per diagonal suffices.
        let mut best = vec![(0usize, f64::NEG_INFINITY); diagonals];
        for tau in 0..=cap {
            for k in 0..width {
                let idx = tau * width + k;
                let slot = &mut best[tau + offset - k * w];
                let key = old.y[idx] - k as f64 * a;
                if key >= slot.1 {
                    *slot = (k, key);
                }
                let c = k - slot.0;
                if c > 0 {
                    new.y[idx] = old.y[idx - c * (w * width + 1)] + c as f64 * a;
                    take[idx] = c as u32;
                }
            }
        }
        return (new, take);
    }
    let mut windows: Vec<VecDeque<(usize, f64)>> = vec![VecDeque::new(); diagonals];
    for tau in 0..=cap {
        for k in 0..width {
            let idx = tau * width + k;
            let window = &mut windows[tau + offset - k * w];
            let key = old.y[idx] - k as f64 * a;
            while window.back().is_some_and(|&(_, b)| b <= key) {
                window.pop_back();
            }
            window.push_back((k, key));
            while window.front().is_some_and(|&(i, _)| k - i > len) {
                window.pop_front();
            }
            let c = k - window[0].0;
            if c > 0 {
                new.y[idx] = old.y[idx - c * (w * width + 1)] + c as f64 * a;
                take[idx] = c as u32;
            }
        }
    }
    (new, take)
}

/// Exact CCKP by dynamic programming over runs of identical items. The
/// table after each run equals the item-by-item recursion after the run's
/// last item. Ties prefer lower item indices.
pub fn solve_cckp_dp(cckp: &CckpInstance) -> Result<CckpSelection, AmdpError> {
    let card = cckp.cardinality;
    if card == 0 {
        return Ok(CckpSelection { items: Vec::new(), value: 0.0 });
    }
    let infeasible = AmdpError::Infeasible { cardinality: card, capacity: cckp.capacity };
    if cckp.len() < card {
        return Err(infeasible);
    }
    let runs = item_runs(cckp);
    let mut table = DpTable::empty(cckp.capacity, card);
    let mut takes = Vec::with_capacity(runs.len());
    for &(start, len) in &runs {
        let w = cckp.weights[start];
        if w > cckp.capacity {
            takes.push(None);
            continue;
        }
        let (next, take) = apply_run(&table, cckp.values[start], w as usize, len);
        table = next;
        takes.push(Some(take));
    }
    let value = table.get(cckp.capacity, card);
    if value == f64::NEG_INFINITY {
        return Err(infeasible);
    }

    let width = card + 1;
    let mut tau = cckp.capacity as usize;
    let mut k = card;
    let mut items = Vec::with_capacity(card);
    for (&(start, _), take) in runs.iter().zip(&takes).rev() {
        let Some(take) = take else { continue };
        let c = take[tau * width + k] as usize;
        items.extend(start..start + c);
        tau -= c * cckp.weights[start] as usize;
        k -= c;
    }
    debug_assert_eq!(k, 0);
    items.sort_unstable();
    Ok(CckpSelection { items, value })
}

/// Table after each item of the item-by-item recursion, for inspecting
/// monotonicity. Memory is `O(items * capacity * cardinality)`; meant for
/// small inputs.
pub fn dp_layers(cckp: &CckpInstance) -> Vec<DpTable> {
    let mut layers = Vec::with_capacity(cckp.len());
    run_item_dp(cckp, |t| layers.push(t.clone()));
    layers
}

/// Assigns `counts[i]` jobs to ED model `i`, taking jobs in the given order.
fn place_counts(assignment: &mut [usize], jobs: &[usize], cckp: &CckpInstance, selection: &CckpSelection) {
    let mut next = jobs.iter();
    for &item in &selection.items {
        let job = *next.next().expect("selection larger than the job list");
        assignment[job] = cckp.model_of(item);
    }
}

/// AMDP for identical jobs: the last `n_c` jobs go to the ES, the rest
/// follow the knapsack solution.
pub fn run_amdp(instance: &Instance, delta: f64) -> Result<SolveReport, AmdpError> {
    let started = Instant::now();
    let n = instance.n();
    let es = instance.es();
    let mut assignment = vec![es; n];
    if let CckpBuild::Knapsack { n_c, cckp } = build_cckp(instance, delta)? {
        let n_l = n - n_c;
        let selection = solve_cckp_dp(&cckp)?;
        let jobs: Vec<usize> = (0..n_l).collect();
        place_counts(&mut assignment, &jobs, &cckp, &selection);
    }
    Ok(SolveReport::finish(Algorithm::Amdp, instance, Schedule::new(assignment), started))
}

/// AMDP with per-job communication times: ED times and ES compute times are
/// identical across jobs, but the ES total time varies with `c_j`. Jobs are
/// offloaded in increasing order of communication time while they fit; the
/// rest are solved as a CCKP.
pub fn run_amdp_hetero(instance: &Instance, delta: f64) -> Result<SolveReport, AmdpError> {
    let started = Instant::now();
    check_delta(delta)?;
    let comm = instance.comm_times().ok_or(AmdpError::MissingCommTimes)?;
    let n = instance.n();
    let m = instance.m();
    let es = instance.es();
    let tolerance = delta / 2.0;

    let ed_reps = identical_times(instance, 0..m, delta)?;
    let compute: Vec<f64> = (0..n).map(|j| instance.time(es, j) - comm[j]).collect();
    let (lo, hi) = compute.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)));
    if hi - lo > tolerance {
        return Err(AmdpError::NotIdenticalEsCompute { spread: hi - lo, tolerance });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| comm[x].total_cmp(&comm[y]));
    let budget = units_floor(instance.deadline(), delta);
    let mut used = 0u64;
    let mut offloaded = 0;
    for &j in &order {
        let u = units_ceil(instance.time(es, j), delta);
        if used + u > budget {
            break;
        }
        used += u;
        offloaded += 1;
    }

    let mut assignment = vec![es; n];
    let mut rest: Vec<usize> = order[offloaded..].to_vec();
    rest.sort_unstable();
    if !rest.is_empty() {
        let ed_units: Vec<u64> = ed_reps.iter().map(|&p| units_ceil(p, delta)).collect();
        let cckp = CckpInstance::from_models(&instance.accuracies()[..m], &ed_units, rest.len(), budget);
        let selection = solve_cckp_dp(&cckp)?;
        place_counts(&mut assignment, &rest, &cckp, &selection);
    }
    Ok(SolveReport::finish(Algorithm::AmdpHetero, instance, Schedule::new(assignment), started))
}
