use std::time::Duration;

use crate::partition::{is_refinement, Partition};

/// What one algorithm run produced, iteration by iteration.
#[derive(Clone, Debug)]
pub struct PartitionTrace {
    /// Block count of the starting partition (before iteration 1).
    pub initial_block_count: usize,
    /// Block count after each executed iteration.
    pub block_counts: Vec<usize>,
    /// Time spent before the first iteration.
    pub init_time: Duration,
    /// Wall time of each executed iteration. The last entry includes
    /// building the final partition.
    pub iteration_times: Vec<Duration>,
    pub partition: Partition,
    /// The fixpoint check fired and the loop stopped.
    pub terminated_early: bool,
    pub iterations_executed: usize,
    /// Level partitions `[initial, after 1, after 2, ...]`, when requested.
    pub levels: Option<Vec<Partition>>,
}

impl PartitionTrace {
    pub fn block_count(&self) -> usize {
        self.partition.block_count()
    }

    pub fn total_iteration_time(&self) -> Duration {
        self.iteration_times.iter().sum()
    }

    /// Block counts are nondecreasing and, when levels were recorded, every
    /// level refines its predecessor.
    pub fn is_monotone(&self) -> bool {
        let counts_ok = std::iter::once(self.initial_block_count)
            .chain(self.block_counts.iter().copied())
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[0] <= w[1]);
        let levels_ok = self.levels.as_ref().is_none_or(|levels| {
            levels
                .windows(2)
                .all(|w| is_refinement(&w[1], &w[0]).unwrap_or(false))
        });
        counts_ok && levels_ok
    }
}
