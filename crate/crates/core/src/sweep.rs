//! Seed sweeps and batch evaluation.
//!
//! With the `parallel` feature (on by default) independent items run on the
//! rayon pool; without it, or through the `_sequential` variants, they run
//! in order on the calling thread. Results are returned in input order
//! either way, so both paths produce identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::metrics::MetricsReport;
use crate::scenario::{ScenarioConfig, ScenarioError};
use crate::sim;

/// Maps `f` over `items`, in parallel when the feature is enabled.
pub fn batch_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        batch_map_sequential(items, f)
    }
}

pub fn batch_map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

fn with_seed(cfg: &ScenarioConfig, seed: u64) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.seed = seed;
    c
}

/// One report per seed, in seed order.
pub fn run_seeds(cfg: &ScenarioConfig, seeds: &[u64]) -> Result<Vec<MetricsReport>, ScenarioError> {
    cfg.validate()?;
    batch_map(seeds, |s| sim::run(&with_seed(cfg, *s)))
        .into_iter()
        .collect()
}

pub fn run_seeds_sequential(
    cfg: &ScenarioConfig,
    seeds: &[u64],
) -> Result<Vec<MetricsReport>, ScenarioError> {
    cfg.validate()?;
    batch_map_sequential(seeds, |s| sim::run(&with_seed(cfg, *s)))
        .into_iter()
        .collect()
}
