//! Greedy round-robin baseline.

use std::time::Instant;

use crate::model::{Algorithm, Instance, Schedule, SolveReport};

/// Greedy-RRA in three phases:
///
/// 1. offload jobs in list order while the ES load stays within `T`, stopping
///    at the first job that does not fit;
/// 2. cycle the remaining jobs over ED models `0..m` while the ED load stays
///    within `T`, again stopping at the first misfit;
/// 3. put everything left on model 0, ignoring `T`.
pub fn greedy_rra(instance: &Instance) -> SolveReport {
    let started = Instant::now();
    let n = instance.n();
    let m = instance.m();
    let es = instance.es();
    let t = instance.deadline();
    let mut assignment = vec![0; n];

    let mut j = 0;
    let mut es_load = 0.0;
    while j < n && es_load + instance.time(es, j) <= t {
        es_load += instance.time(es, j);
        assignment[j] = es;
        j += 1;
    }

    let mut ed_load = 0.0;
    let mut turn = 0;
    while j < n {
        let model = turn % m;
        if ed_load + instance.time(model, j) > t {
            break;
        }
        ed_load += instance.time(model, j);
        assignment[j] = model;
        turn += 1;
        j += 1;
    }
    // Phase 3: `assignment` already holds model 0 for the rest.

    SolveReport::finish(Algorithm::Greedy, instance, Schedule::new(assignment), started)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e2_step_through() {
        let inst = Instance::new(vec![0.5, 1.0], vec![vec![0.6, 0.6], vec![0.6, 0.6]], None, 0.9).unwrap();
        let r = greedy_rra(&inst);
        assert_eq!(r.schedule.assignment, vec![1, 0]);
        assert_eq!(r.metrics.total_accuracy, 1.5);
        assert_eq!(r.metrics.makespan, 0.6);
    }

    #[test]
    fn single_job_goes_to_es() {
        let inst = Instance::new(vec![0.5, 0.9], vec![vec![0.1], vec![0.5]], None, 1.0).unwrap();
        let r = greedy_rra(&inst);
        assert_eq!(r.schedule.assignment, vec![1]);
        assert_eq!(r.metrics.total_accuracy, 0.9);
    }

    #[test]
    fn everything_too_slow_lands_on_model_zero() {
        let inst = Instance::new(vec![0.3, 0.5, 0.9], vec![vec![2.0; 2], vec![3.0; 2], vec![4.0; 2]], None, 1.0)
            .unwrap();
        let r = greedy_rra(&inst);
        assert_eq!(r.schedule.assignment, vec![0, 0]);
        assert!(r.metrics.violates_deadline);
    }

    #[test]
    fn round_robin_stops_at_first_misfit() {
        // ES takes job 0; ED cycles 0,1,0 and model 1 misfits for job 4.
        let inst = Instance::new(
            vec![0.3, 0.5, 0.9],
            vec![vec![0.1; 6], vec![0.45; 6], vec![0.8; 6]],
            None,
            1.0,
        )
        .unwrap();
        let r = greedy_rra(&inst);
        assert_eq!(r.schedule.assignment, vec![2, 0, 1, 0, 0, 0]);
    }
}
