//! Seeded instance generators.
//!
//! All randomness comes from SplitMix64 (`state += 0x9e3779b97f4a7c15`, then
//! the `0xbf58476d1ce4e5b9` / `0x94d049bb133111eb` finalizer) seeded directly
//! with the 64-bit seed. A uniform draw in `[0, 1)` is `(next_u64() >> 11) *
//! 2^-53`. Draws are consumed job by job, so the first `k` jobs of an
//! instance do not depend on `n`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, ModelError};

/// Accuracies of the two ED models and the ES model in the `table2` profile.
pub const TABLE2_ACCURACIES: [f64; 3] = [0.395, 0.559, 0.771];
/// Image sizes of the `table2` profile, in pixels per side.
pub const TABLE2_SIZES: [u32; 3] = [128, 512, 1024];
/// ED processing times per size tier: `[tier][model]`.
pub const TABLE2_ED_TIMES: [[f64; 2]; 3] = [[0.01, 0.04], [0.011, 0.04], [0.011, 0.043]];
/// ES compute time per size tier.
pub const TABLE2_ES_COMPUTE: [f64; 3] = [0.28, 0.32, 0.38];
/// Synthetic communication time: uniform in this range, times the tier scale.
pub const TABLE2_COMM_RANGE: (f64, f64) = (0.05, 0.15);
pub const TABLE2_COMM_SCALE: [f64; 3] = [1.0, 2.0, 3.0];

/// Accuracies of the random profiles are drawn uniformly from this range.
pub const RANDOM_ACCURACY_RANGE: (f64, f64) = (0.3, 1.0);
pub const DEFAULT_GRID: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Table2,
    MonotoneRandom,
    IdenticalRandom,
}

impl std::str::FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table2" => Ok(Profile::Table2),
            "monotone_random" => Ok(Profile::MonotoneRandom),
            "identical_random" => Ok(Profile::IdenticalRandom),
            other => Err(format!("unknown profile `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub profile: Profile,
    pub n: usize,
    /// Number of ED models; ignored (always 2) for `table2`.
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(rename = "T")]
    pub deadline: f64,
    #[serde(default)]
    pub seed: u64,
    /// `[low, high]` seconds per model (ES last) for the random profiles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiers: Option<Vec<[f64; 2]>>,
    /// Probabilities of the 128/512/1024 image sizes for `table2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_mix: Option<[f64; 3]>,
    /// Time grid of `identical_random`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<f64>,
}

fn default_m() -> usize {
    2
}

impl GenParams {
    pub fn new(profile: Profile, n: usize, m: usize, deadline: f64, seed: u64) -> Self {
        GenParams { profile, n, m, deadline, seed, tiers: None, size_mix: None, grid: None }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Default tier `i`: `[0.1 i + 0.02, 0.1 (i + 1)]` seconds. Disjoint, so
/// times strictly increase with the model index.
pub fn default_tiers(models: usize) -> Vec<[f64; 2]> {
    (0..models).map(|i| [0.1 * i as f64 + 0.02, 0.1 * (i + 1) as f64]).collect()
}

pub(crate) struct Stream(SplitMix64);

impl Stream {
    pub(crate) fn new(seed: u64) -> Self {
        Stream(SplitMix64::seed_from_u64(seed))
    }

    pub(crate) fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub(crate) fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub(crate) fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + ((self.uniform() * (hi - lo + 1) as f64) as usize).min(hi - lo)
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
}

fn invalid(msg: impl Into<String>) -> GenError {
    GenError::InvalidParams(msg.into())
}

fn check_tiers(tiers: &[[f64; 2]], models: usize) -> Result<(), GenError> {
    if tiers.len() != models {
        return Err(invalid(format!("expected {models} tiers, got {}", tiers.len())));
    }
    for (i, &[lo, hi]) in tiers.iter().enumerate() {
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(invalid(format!("tier {i} = [{lo}, {hi}] must satisfy 0 < low <= high")));
        }
    }
    for (i, w) in tiers.windows(2).enumerate() {
        if w[0][1] >= w[1][0] {
            return Err(invalid(format!("tiers {i} and {} overlap", i + 1)));
        }
    }
    Ok(())
}

fn random_accuracies(stream: &mut Stream, models: usize) -> Vec<f64> {
    let (lo, hi) = RANDOM_ACCURACY_RANGE;
    let mut a: Vec<f64> = (0..models).map(|_| stream.range(lo, hi)).collect();
    a.sort_by(f64::total_cmp);
    a
}

/// Draws an instance. Deterministic in `params`.
pub fn generate(params: &GenParams) -> Result<Instance, GenError> {
    if params.n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if !(params.deadline > 0.0 && params.deadline.is_finite()) {
        return Err(invalid(format!("T = {} must be positive", params.deadline)));
    }
    let mut stream = Stream::new(params.seed);
    match params.profile {
        Profile::Table2 => table2(params, &mut stream),
        Profile::MonotoneRandom => monotone(params, &mut stream),
        Profile::IdenticalRandom => identical(params, &mut stream),
    }
}

fn table2(params: &GenParams, stream: &mut Stream) -> Result<Instance, GenError> {
    let mix = params.size_mix.unwrap_or([1.0 / 3.0; 3]);
    let total: f64 = mix.iter().sum();
    if mix.iter().any(|&p| !(p >= 0.0)) || !(total > 0.0) {
        return Err(invalid(format!("size mix {mix:?} must be nonnegative with a positive sum")));
    }
    let n = params.n;
    let mut times = vec![Vec::with_capacity(n); 3];
    let mut comm = Vec::with_capacity(n);
    for _ in 0..n {
        let u = stream.uniform() * total;
        let tier = if u < mix[0] {
            0
        } else if u < mix[0] + mix[1] {
            1
        } else {
            2
        };
        let c = stream.range(TABLE2_COMM_RANGE.0, TABLE2_COMM_RANGE.1) * TABLE2_COMM_SCALE[tier];
        times[0].push(TABLE2_ED_TIMES[tier][0]);
        times[1].push(TABLE2_ED_TIMES[tier][1]);
        times[2].push(TABLE2_ES_COMPUTE[tier] + c);
        comm.push(c);
    }
    Ok(Instance::new(TABLE2_ACCURACIES.to_vec(), times, Some(comm), params.deadline)?)
}

fn resolved_tiers(params: &GenParams) -> Result<Vec<[f64; 2]>, GenError> {
    if params.m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    let tiers = params.tiers.clone().unwrap_or_else(|| default_tiers(params.m + 1));
    check_tiers(&tiers, params.m + 1)?;
    Ok(tiers)
}

fn monotone(params: &GenParams, stream: &mut Stream) -> Result<Instance, GenError> {
    let tiers = resolved_tiers(params)?;
    let models = params.m + 1;
    let accuracies = random_accuracies(stream, models);
    let mut times = vec![Vec::with_capacity(params.n); models];
    for _ in 0..params.n {
        for (row, &[lo, hi]) in times.iter_mut().zip(&tiers) {
            row.push(stream.range(lo, hi));
        }
    }
    Ok(Instance::new(accuracies, times, None, params.deadline)?)
}

fn identical(params: &GenParams, stream: &mut Stream) -> Result<Instance, GenError> {
    let tiers = resolved_tiers(params)?;
    let grid = params.grid.unwrap_or(DEFAULT_GRID);
    if !(grid > 0.0 && grid.is_finite()) {
        return Err(invalid(format!("grid {grid} must be positive")));
    }
    let models = params.m + 1;
    let accuracies = random_accuracies(stream, models);
    let times = tiers
        .iter()
        .map(|&[lo, hi]| {
            let steps = (stream.range(lo, hi) / grid).ceil().max(1.0);
            vec![steps * grid; params.n]
        })
        .collect();
    Ok(Instance::new(accuracies, times, None, params.deadline)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_matches_reference_splitmix64() {
        // First outputs of splitmix64.c seeded with 1477776061723855037.
        let mut s = Stream::new(1477776061723855037);
        assert_eq!(s.0.next_u64(), 1985237415132408290);
        assert_eq!(s.0.next_u64(), 2979275885539914483);
    }

    #[test]
    fn table2_profile_values() {
        let params = GenParams { size_mix: Some([1.0, 0.0, 0.0]), ..GenParams::new(Profile::Table2, 5, 7, 1.0, 3) };
        let inst = generate(&params).unwrap();
        assert_eq!(inst.m(), 2);
        assert_eq!(inst.accuracies(), &[0.395, 0.559, 0.771]);
        let comm = inst.comm_times().unwrap();
        for j in 0..5 {
            assert_eq!((inst.time(0, j), inst.time(1, j)), (0.01, 0.04));
            assert!((inst.time(2, j) - comm[j] - 0.28).abs() < 1e-12);
            assert!((0.05..=0.15).contains(&comm[j]));
        }
    }

    #[test]
    fn table2_tiers_follow_the_mix() {
        let params = GenParams { size_mix: Some([0.0, 0.0, 1.0]), ..GenParams::new(Profile::Table2, 3, 2, 1.0, 9) };
        let inst = generate(&params).unwrap();
        assert_eq!(inst.times()[0], vec![0.011; 3]);
        assert_eq!(inst.times()[1], vec![0.043; 3]);
    }

    #[test]
    fn monotone_columns_strictly_increase() {
        for seed in 0..20 {
            let inst = generate(&GenParams::new(Profile::MonotoneRandom, 12, 4, 2.0, seed)).unwrap();
            for j in 0..inst.n() {
                for i in 1..=inst.m() {
                    assert!(inst.time(i - 1, j) < inst.time(i, j));
                }
            }
        }
    }

    #[test]
    fn identical_profile_has_identical_grid_columns() {
        let inst = generate(&GenParams::new(Profile::IdenticalRandom, 6, 3, 2.0, 11)).unwrap();
        for row in inst.times() {
            assert!(row.iter().all(|&p| p == row[0]));
            let steps = row[0] / DEFAULT_GRID;
            assert!((steps - steps.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn same_seed_same_instance_and_prefix_stability() {
        let p = GenParams::new(Profile::MonotoneRandom, 10, 3, 1.5, 42);
        assert_eq!(generate(&p).unwrap(), generate(&p).unwrap());
        let long = generate(&GenParams::new(Profile::Table2, 60, 2, 4.0, 5)).unwrap();
        let short = generate(&GenParams::new(Profile::Table2, 30, 2, 4.0, 5)).unwrap();
        let first: Vec<usize> = (0..30).collect();
        assert_eq!(long.select_jobs(&first).unwrap(), short);
    }

    #[test]
    fn invalid_params() {
        assert!(generate(&GenParams::new(Profile::MonotoneRandom, 0, 2, 1.0, 0)).is_err());
        assert!(generate(&GenParams::new(Profile::MonotoneRandom, 3, 0, 1.0, 0)).is_err());
        assert!(generate(&GenParams::new(Profile::MonotoneRandom, 3, 1, -1.0, 0)).is_err());
        let overlapping = GenParams {
            tiers: Some(vec![[0.1, 0.3], [0.2, 0.4]]),
            ..GenParams::new(Profile::MonotoneRandom, 3, 1, 1.0, 0)
        };
        assert!(matches!(generate(&overlapping), Err(GenError::InvalidParams(_))));
        let bad_mix = GenParams { size_mix: Some([-1.0, 1.0, 1.0]), ..GenParams::new(Profile::Table2, 3, 2, 1.0, 0) };
        assert!(generate(&bad_mix).is_err());
    }
}
