//! Literal, unoptimized evaluations of the four k-bisimulation definitions.
//!
//! Each level's class of `v` is determined by its previous class together
//! with the set of `(edge label, previous class of neighbor)` pairs over
//! successors (forward) or predecessors (backward). Edge labels take part
//! only in the edge-labeled variant. Signatures are compared exactly, no
//! hashing involved.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::graph::{LabeledGraph, Neighbor};
use crate::partition::Partition;
use crate::trace::PartitionTrace;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleVariant {
    /// Successors, no labels; base case `{V}`.
    Forward,
    /// Predecessors, no labels; base case `{V}`.
    Backward,
    /// Successors with matching edge label sets; base case `{V}`.
    EdgeLabeledForward,
    /// Predecessors, base case partitions by vertex label set.
    VertexLabeledBackward,
}

impl OracleVariant {
    pub const ALL: [OracleVariant; 4] = [
        OracleVariant::Forward,
        OracleVariant::Backward,
        OracleVariant::EdgeLabeledForward,
        OracleVariant::VertexLabeledBackward,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OracleVariant::Forward => "forward",
            OracleVariant::Backward => "backward",
            OracleVariant::EdgeLabeledForward => "edge-labeled-forward",
            OracleVariant::VertexLabeledBackward => "vertex-labeled-backward",
        }
    }
}

impl fmt::Display for OracleVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OracleVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OracleVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown oracle variant `{s}`"))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Backward,
}

const NO_LABEL: u32 = u32::MAX;

/// One refinement step: returns the next level's class per vertex.
fn refine_once(g: &LabeledGraph, prev: &[u32], dir: Direction, edge_labels: bool) -> Vec<u32> {
    let mut index: HashMap<(u32, Vec<(u32, u32)>), u32> = HashMap::new();
    let mut next = Vec::with_capacity(prev.len());
    for v in g.vertices() {
        let adj: &[Neighbor] = match dir {
            Direction::Forward => g.out_neighbors(v),
            Direction::Backward => g.in_neighbors(v),
        };
        let mut sig: Vec<(u32, u32)> = adj
            .iter()
            .map(|nb| {
                let label = if edge_labels { nb.labels.0 } else { NO_LABEL };
                (label, prev[nb.vertex as usize])
            })
            .collect();
        sig.sort_unstable();
        sig.dedup();
        let fresh = index.len() as u32;
        next.push(*index.entry((prev[v as usize], sig)).or_insert(fresh));
    }
    next
}

/// Levels `0..=k` starting from `initial`.
pub(crate) fn refine_levels(
    g: &LabeledGraph,
    initial: Partition,
    k: usize,
    dir: Direction,
    edge_labels: bool,
) -> Vec<Partition> {
    let mut classes: Vec<u32> = initial.block_ids().to_vec();
    let mut levels = vec![initial];
    for _ in 0..k {
        classes = refine_once(g, &classes, dir, edge_labels);
        levels.push(Partition::from_keys(&classes));
    }
    levels
}

fn setup(variant: OracleVariant, g: &LabeledGraph) -> (Partition, Direction, bool) {
    let n = g.vertex_count();
    match variant {
        OracleVariant::Forward => (Partition::single_block(n), Direction::Forward, false),
        OracleVariant::Backward => (Partition::single_block(n), Direction::Backward, false),
        OracleVariant::EdgeLabeledForward => (Partition::single_block(n), Direction::Forward, true),
        OracleVariant::VertexLabeledBackward => (Partition::by_vertex_labels(g), Direction::Backward, false),
    }
}

/// All level partitions `0..=k` of one variant.
pub fn oracle_levels(g: &LabeledGraph, variant: OracleVariant, k: usize) -> Vec<Partition> {
    let (initial, dir, labels) = setup(variant, g);
    refine_levels(g, initial, k, dir, labels)
}

pub fn oracle(g: &LabeledGraph, variant: OracleVariant, k: usize) -> Partition {
    oracle_levels(g, variant, k).pop().expect("level 0 always exists")
}

pub fn oracle_forward(g: &LabeledGraph, k: usize) -> Partition {
    oracle(g, OracleVariant::Forward, k)
}

pub fn oracle_backward(g: &LabeledGraph, k: usize) -> Partition {
    oracle(g, OracleVariant::Backward, k)
}

pub fn oracle_edge_labeled_forward(g: &LabeledGraph, k: usize) -> Partition {
    oracle(g, OracleVariant::EdgeLabeledForward, k)
}

pub fn oracle_vertex_labeled_backward(g: &LabeledGraph, k: usize) -> Partition {
    oracle(g, OracleVariant::VertexLabeledBackward, k)
}

/// Runs an oracle with timing, for the experiment runner. Always executes
/// all `k` levels.
pub fn oracle_trace(g: &LabeledGraph, variant: OracleVariant, k: usize, record_levels: bool) -> PartitionTrace {
    let start = Instant::now();
    let (initial, dir, labels) = setup(variant, g);
    let mut classes: Vec<u32> = initial.block_ids().to_vec();
    let initial_block_count = initial.block_count();
    let init_time = start.elapsed();
    let mut levels = record_levels.then(|| vec![initial.clone()]);
    let mut partition = initial;
    let mut block_counts = Vec::new();
    let mut iteration_times = Vec::new();
    for _ in 0..k {
        let t = Instant::now();
        classes = refine_once(g, &classes, dir, labels);
        partition = Partition::from_keys(&classes);
        block_counts.push(partition.block_count());
        if let Some(l) = levels.as_mut() {
            l.push(partition.clone());
        }
        iteration_times.push(t.elapsed());
    }
    PartitionTrace {
        initial_block_count,
        block_counts,
        init_time,
        iteration_times,
        partition,
        terminated_early: false,
        iterations_executed: k,
        levels,
    }
}
