//! Offloading inference jobs from an edge device (ED) with several models of
//! increasing accuracy to an edge server (ES) with one high-accuracy model,
//! maximizing total accuracy under a makespan budget `T`.
//!
//! Solvers:
//! - [`amr2::run_amr2`]: LP relaxation plus rounding of at most two split
//!   jobs; makespan at most `2T`, accuracy within `2(a_es - a_0)` of optimal.
//! - [`amdp::run_amdp`]: optimal for identical jobs via a cardinality
//!   constrained knapsack DP.
//! - [`baseline::greedy_rra`]: greedy prefix offloading plus round robin.
//! - [`oracle::exact_ilp`]: exhaustive ground truth for small instances.

pub mod amdp;
pub mod amr2;
pub mod baseline;
pub mod cli;
pub mod gen;
pub mod io;
pub mod model;
pub mod oracle;
pub mod simplex;
pub mod solve;
pub mod verify;

pub use model::{evaluate, Algorithm, Instance, Metrics, ModelError, Schedule, SolveReport};
