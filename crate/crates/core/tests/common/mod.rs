#![allow(dead_code)]

use edgesched::simplex::StandardLp;
use edgesched::Instance;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// Best objective over all basic feasible solutions, found by trying every
/// set of `rows` columns. `None` when no basis is feasible.
pub fn lp_brute_force(lp: &StandardLp) -> Option<f64> {
    let rows = lp.num_rows();
    let cols = lp.num_cols();
    let a = DMatrix::from_fn(rows, cols, |r, c| lp.rows()[r][c]);
    let b = DVector::from_column_slice(lp.rhs());
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..rows).collect();
    loop {
        let basis = a.select_columns(subset.iter());
        let lu = basis.clone().lu();
        if basis.determinant().abs() > 1e-12 {
            if let Some(x) = lu.solve(&b) {
                if x.iter().all(|&v| v >= -1e-9) {
                    let value: f64 = subset.iter().zip(x.iter()).map(|(&c, &v)| lp.objective()[c] * v).sum();
                    best = Some(best.map_or(value, |b: f64| b.max(value)));
                }
            }
        }
        // Next combination in lexicographic order.
        let mut i = rows;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] < cols - rows + i {
                subset[i] += 1;
                for k in i + 1..rows {
                    subset[k] = subset[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Best value of placing jobs `j1`, `j2` with a fresh budget `T` per machine,
/// over all `(m + 1)^2` assignments.
pub fn sub_ilp_brute_force(inst: &Instance, j1: usize, j2: usize) -> Option<f64> {
    let es = inst.es();
    let t = inst.deadline();
    let mut best: Option<f64> = None;
    for i1 in 0..=es {
        for i2 in 0..=es {
            let mut ed = 0.0;
            let mut esl = 0.0;
            for (i, j) in [(i1, j1), (i2, j2)] {
                if i == es {
                    esl += inst.time(i, j);
                } else {
                    ed += inst.time(i, j);
                }
            }
            if ed <= t && esl <= t {
                let v = inst.accuracy(i1) + inst.accuracy(i2);
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
    }
    best
}

/// Instances with `m` in `1..=max_m`, `n` in `1..=max_n`, sorted accuracies
/// and arbitrary positive times.
pub fn instances(max_m: usize, max_n: usize) -> impl Strategy<Value = Instance> {
    (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| {
        (
            proptest::collection::vec(0.0f64..1.0, m + 1),
            proptest::collection::vec(proptest::collection::vec(0.01f64..1.0, n), m + 1),
            0.05f64..2.0,
        )
            .prop_map(|(mut acc, times, t)| {
                acc.sort_by(f64::total_cmp);
                Instance::new(acc, times, None, t).unwrap()
            })
    })
}

/// Exactly two jobs.
pub fn pairs(max_m: usize) -> impl Strategy<Value = Instance> {
    (1..=max_m).prop_flat_map(|m| {
        (
            proptest::collection::vec(0.0f64..1.0, m + 1),
            proptest::collection::vec(proptest::collection::vec(0.01f64..1.0, 2), m + 1),
            0.05f64..1.5,
        )
            .prop_map(|(mut acc, times, t)| {
                acc.sort_by(f64::total_cmp);
                Instance::new(acc, times, None, t).unwrap()
            })
    })
}
