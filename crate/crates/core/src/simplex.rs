//! LP relaxation of the assignment problem and a dense two-phase simplex.
//!
//! The relaxation keeps the two machine-time rows as equalities with explicit
//! slack columns and one equality per job:
//!
//! ```text
//! max  sum_ij a_i x_ij
//! s.t. sum_{i<m} sum_j p_ij x_ij + s1 = T
//!      sum_j p_mj x_mj           + s2 = T
//!      sum_i x_ij                     = 1    for every job j
//!      x, s >= 0
//! ```
//!
//! Column `i * n + j` holds `x_ij`; the last two columns are `s1` and `s2`.
//! A basic solution has `n + 2` basic columns, so at most two jobs can be
//! split between models.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::Instance;

/// Feasibility and integrality tolerance.
pub const EPS: f64 = 1e-9;
/// Smallest magnitude accepted as a pivot element.
pub const PIVOT_TOL: f64 = 1e-10;

const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplexError {
    #[error("malformed LP: {0}")]
    Malformed(String),
    #[error("constraint matrix is rank deficient (row {0} is redundant)")]
    RankDeficient(usize),
    #[error("pivot limit of {0} exceeded")]
    PivotLimit(usize),
    #[error("numerical breakdown: {0}")]
    Numerical(&'static str),
}

/// An LP in equality form: maximize `objective . x` s.t. `rows x = rhs`, `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl StandardLp {
    pub fn new(objective: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self, SimplexError> {
        if rows.len() != rhs.len() {
            return Err(SimplexError::Malformed(format!(
                "{} rows but {} right-hand sides",
                rows.len(),
                rhs.len()
            )));
        }
        if let Some(r) = rows.iter().position(|row| row.len() != objective.len()) {
            return Err(SimplexError::Malformed(format!(
                "row {r} has {} columns, expected {}",
                rows[r].len(),
                objective.len()
            )));
        }
        if let Some(r) = rhs.iter().position(|&b| !(b >= 0.0)) {
            return Err(SimplexError::Malformed(format!("rhs[{r}] = {} is negative", rhs[r])));
        }
        Ok(StandardLp { objective, rows, rhs })
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    /// `rows . x - rhs` for each row.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b)
            .collect()
    }
}

/// Column of `x_ij` in the relaxation of an instance with `n` jobs.
pub fn column(model: usize, job: usize, n: usize) -> usize {
    model * n + job
}

/// LP relaxation of the assignment problem for `instance`.
pub fn build_relaxation(instance: &Instance) -> StandardLp {
    let n = instance.n();
    let models = instance.m() + 1;
    let es = instance.es();
    let cols = n * models + 2;
    let (s1, s2) = (cols - 2, cols - 1);

    let mut objective = vec![0.0; cols];
    let mut ed_row = vec![0.0; cols];
    let mut es_row = vec![0.0; cols];
    for i in 0..models {
        for j in 0..n {
            let c = column(i, j, n);
            objective[c] = instance.accuracy(i);
            if i == es {
                es_row[c] = instance.time(i, j);
            } else {
                ed_row[c] = instance.time(i, j);
            }
        }
    }
    ed_row[s1] = 1.0;
    es_row[s2] = 1.0;

    let mut rows = Vec::with_capacity(n + 2);
    rows.push(ed_row);
    rows.push(es_row);
    for j in 0..n {
        let mut row = vec![0.0; cols];
        for i in 0..models {
            row[column(i, j, n)] = 1.0;
        }
        rows.push(row);
    }
    let mut rhs = vec![1.0; n + 2];
    rhs[0] = instance.deadline();
    rhs[1] = instance.deadline();

    StandardLp { objective, rows, rhs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasicSolution {
    pub status: LpStatus,
    /// Primal values, one per LP column. Empty unless `status` is `Optimal`.
    pub values: Vec<f64>,
    /// Basic column per constraint row.
    pub basis: Vec<usize>,
    pub objective: f64,
}

impl BasicSolution {
    fn without_point(status: LpStatus) -> Self {
        BasicSolution { status, values: Vec::new(), basis: Vec::new(), objective: f64::NAN }
    }
}

/// Dense tableau: `rows x (cols + 1)`, the last column being the RHS.
struct Tableau {
    data: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// Reduced-cost row `c_B B^-1 A - c`, plus the objective value in the last slot.
    zrow: Vec<f64>,
    /// Columns allowed to enter the basis.
    enterable: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.zrow.len() - 1
    }

    fn set_costs(&mut self, costs: &[f64]) {
        let width = self.zrow.len();
        for c in 0..width {
            let mut acc = 0.0;
            for (r, row) in self.data.iter().enumerate() {
                acc += costs[self.basis[r]] * row[c];
            }
            self.zrow[c] = if c < width - 1 { acc - costs[c] } else { acc };
        }
    }

    fn pivot(&mut self, prow: usize, pcol: usize) {
        let width = self.zrow.len();
        let inv = 1.0 / self.data[prow][pcol];
        for v in self.data[prow].iter_mut() {
            *v *= inv;
        }
        self.data[prow][pcol] = 1.0;
        let pivot_row = self.data[prow].clone();
        for (r, row) in self.data.iter_mut().enumerate() {
            if r == prow {
                continue;
            }
            let f = row[pcol];
            if f != 0.0 {
                for c in 0..width {
                    row[c] -= f * pivot_row[c];
                }
                row[pcol] = 0.0;
            }
        }
        let f = self.zrow[pcol];
        if f != 0.0 {
            for c in 0..width {
                self.zrow[c] -= f * pivot_row[c];
            }
            self.zrow[pcol] = 0.0;
        }
        self.basis[prow] = pcol;
    }

    /// Bland's rule: lowest-index improving column enters; among rows tied in
    /// the ratio test the one whose basic column has the lowest index leaves.
    fn run(&mut self, pivots: &mut usize) -> Result<PhaseEnd, SimplexError> {
        let rhs = self.rhs_col();
        loop {
            let Some(enter) = (0..self.enterable).find(|&c| self.zrow[c] < -EPS) else {
                return Ok(PhaseEnd::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (r, row) in self.data.iter().enumerate() {
                let a = row[enter];
                if a > PIVOT_TOL {
                    let ratio = row[rhs].max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - PIVOT_TOL
                                || (ratio <= lratio + PIVOT_TOL && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((prow, _)) = leave else {
                return Ok(PhaseEnd::Unbounded);
            };
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(SimplexError::PivotLimit(MAX_PIVOTS));
            }
            self.pivot(prow, enter);
        }
    }
}

/// Two-phase simplex with Bland's rule. Deterministic for a fixed input.
///
/// Phase I starts from an all-artificial basis and minimizes the sum of
/// artificials; any artificial still basic afterwards is pivoted out on the
/// lowest-index structural column of its row.
pub fn simplex_solve(lp: &StandardLp) -> Result<BasicSolution, SimplexError> {
    let rows = lp.num_rows();
    let cols = lp.num_cols();
    let width = cols + rows + 1;

    let data = lp
        .rows
        .iter()
        .zip(&lp.rhs)
        .enumerate()
        .map(|(r, (row, &b))| {
            let mut t = vec![0.0; width];
            t[..cols].copy_from_slice(row);
            t[cols + r] = 1.0;
            t[width - 1] = b;
            t
        })
        .collect();
    let mut tab = Tableau {
        data,
        basis: (cols..cols + rows).collect(),
        zrow: vec![0.0; width],
        enterable: cols + rows,
    };
    let mut pivots = 0;

    // Phase I: maximize -(sum of artificials).
    let mut phase1 = vec![0.0; cols + rows];
    phase1[cols..].iter_mut().for_each(|c| *c = -1.0);
    tab.set_costs(&phase1);
    if let PhaseEnd::Unbounded = tab.run(&mut pivots)? {
        return Err(SimplexError::Numerical("phase I reported an unbounded ray"));
    }
    let infeasibility = -tab.zrow[width - 1];
    let scale = 1.0 + lp.rhs.iter().fold(0.0_f64, |acc, &b| acc.max(b));
    if infeasibility > EPS * scale {
        return Ok(BasicSolution::without_point(LpStatus::Infeasible));
    }

    for r in 0..rows {
        if tab.basis[r] >= cols {
            let Some(c) = (0..cols).find(|&c| tab.data[r][c].abs() > PIVOT_TOL) else {
                return Err(SimplexError::RankDeficient(r));
            };
            tab.pivot(r, c);
        }
    }

    // Phase II on the structural columns only.
    tab.enterable = cols;
    let mut costs = lp.objective.clone();
    costs.resize(cols + rows, 0.0);
    tab.set_costs(&costs);
    if let PhaseEnd::Unbounded = tab.run(&mut pivots)? {
        return Ok(BasicSolution::without_point(LpStatus::Unbounded));
    }

    let mut values = vec![0.0; cols];
    for (r, &b) in tab.basis.iter().enumerate() {
        values[b] = tab.data[r][width - 1];
    }
    let objective = lp.objective.iter().zip(&values).map(|(c, v)| c * v).sum();
    Ok(BasicSolution { status: LpStatus::Optimal, values, basis: tab.basis, objective })
}

/// Jobs with some `x_ij` strictly inside `(EPS, 1 - EPS)`, in increasing order.
pub fn fractional_jobs(solution: &BasicSolution, instance: &Instance) -> BTreeSet<usize> {
    let n = instance.n();
    let models = instance.m() + 1;
    (0..n)
        .filter(|&j| {
            (0..models).any(|i| {
                let v = solution.values[column(i, j, n)];
                v > EPS && v < 1.0 - EPS
            })
        })
        .collect()
}
