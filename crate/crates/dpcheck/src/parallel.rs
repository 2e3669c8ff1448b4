//! Multi-threaded frontier expansion.

use dpcheck_core::explorer::{explore_with, Bounds, ExplorationResult, ExploreError, Expander, Sequential};
use dpcheck_core::semantics::{successors, DistributedProcess, DpState, StepError, Successor};
use dpcheck_core::terms::Valuation;
use rayon::prelude::*;

/// Expands each BFS level on a rayon pool. Results keep frontier order, so
/// the explored graph does not depend on the thread count.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        Ok(Parallel { pool: rayon::ThreadPoolBuilder::new().num_threads(threads).build()? })
    }
}

impl Expander for Parallel {
    fn expand(&self, dp: &DistributedProcess, states: &[&DpState]) -> Vec<Result<Vec<Successor>, StepError>> {
        self.pool.install(|| states.par_iter().map(|s| successors(dp, s)).collect())
    }
}

/// Breadth-first exploration with `threads` workers; one thread runs inline.
pub fn explore_threads(
    dp: &DistributedProcess,
    inputs: &Valuation,
    bounds: Bounds,
    threads: usize,
) -> Result<ExplorationResult, ExploreError> {
    if threads <= 1 {
        return explore_with(dp, inputs, bounds, &Sequential);
    }
    match Parallel::new(threads) {
        Ok(p) => explore_with(dp, inputs, bounds, &p),
        // Could not start threads; the sequential result is identical.
        Err(_) => explore_with(dp, inputs, bounds, &Sequential),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dpcheck_core::explorer::explore;
    use dpcheck_core::matmul::{build_augmented, MatmulParams};

    #[test]
    fn thread_count_does_not_change_the_graph() {
        let p = MatmulParams::symbolic(3, 3);
        let dp = build_augmented(&p).unwrap();
        let one = explore(&dp, &p.inputs(), Bounds::default()).unwrap();
        let four = explore_threads(&dp, &p.inputs(), Bounds::default(), 4).unwrap();
        assert_eq!(one, four);
    }
}
