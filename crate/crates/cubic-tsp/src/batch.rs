//! Solving many independent instances at once. Single instances always run
//! single-threaded; batches fan out across a thread pool when the `parallel`
//! feature (on by default) is enabled, and fall back to a plain loop
//! otherwise. Outputs are identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;
use crate::gen::random_cubic_bipartite;
use crate::graph::Graph;
use crate::improve::ImproveConfig;
use crate::tour::{solve_bipartite, SolveOutcome};

/// Sequential reference path, available regardless of features.
pub fn solve_batch_sequential(graphs: &[Graph], cfg: ImproveConfig) -> Vec<Result<SolveOutcome>> {
    graphs.iter().map(|g| solve_bipartite(g, cfg)).collect()
}

/// Solve each instance independently, in parallel when built with the
/// `parallel` feature.
#[cfg(feature = "parallel")]
pub fn solve_batch(graphs: &[Graph], cfg: ImproveConfig) -> Vec<Result<SolveOutcome>> {
    graphs.par_iter().map(|g| solve_bipartite(g, cfg)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn solve_batch(graphs: &[Graph], cfg: ImproveConfig) -> Vec<Result<SolveOutcome>> {
    solve_batch_sequential(graphs, cfg)
}

/// Cap the batch thread pool. Returns false when the pool was already
/// configured (or the build is sequential-only); safe to call once at
/// startup.
#[cfg(feature = "parallel")]
pub fn configure_jobs(jobs: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .is_ok()
}

#[cfg(not(feature = "parallel"))]
pub fn configure_jobs(_jobs: usize) -> bool {
    false
}

/// Deterministic seeded instance sweep: instance `i` uses seed
/// `base_seed + i` and a half-side cycling through `half_lo..=half_hi`.
pub fn fuzz_instances(
    count: usize,
    half_lo: usize,
    half_hi: usize,
    base_seed: u64,
) -> Result<Vec<Graph>> {
    assert!(half_lo >= 3 && half_lo <= half_hi);
    let span = half_hi - half_lo + 1;
    (0..count)
        .map(|i| random_cubic_bipartite(half_lo + i % span, base_seed + i as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_matches_sequential() {
        let graphs = fuzz_instances(12, 8, 12, 99).unwrap();
        let cfg = ImproveConfig::default();
        let par = solve_batch(&graphs, cfg);
        let seq = solve_batch_sequential(&graphs, cfg);
        assert_eq!(par.len(), seq.len());
        for (a, b) in par.iter().zip(&seq) {
            let a = a.as_ref().unwrap();
            let b = b.as_ref().unwrap();
            assert_eq!(a.factor.edges(), b.factor.edges());
            assert_eq!(a.tour.order, b.tour.order);
            assert_eq!(a.tour.length, b.tour.length);
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let a = fuzz_instances(6, 8, 10, 5).unwrap();
        let b = fuzz_instances(6, 8, 10, 5).unwrap();
        assert_eq!(a, b);
    }
}
