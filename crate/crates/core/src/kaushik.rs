//! Split-based stabilization for the vertex-labeled backward k-bisimulation,
//! and the naive relational coarsest partition baseline.
//!
//! A block `B` is split by a splitter `S` into `B ∩ N+(S)` and `B − N+(S)`.
//! Sweep `i` stabilizes the current partition against every block of the
//! partition as it stood when the sweep began. Both procedures are
//! sequential.

use std::collections::HashSet;
use std::time::Instant;

use crate::graph::{LabeledGraph, VertexId};
use crate::hashing::{Id128, IdHasher};
use crate::partition::{BlockId, Partition};
use crate::trace::PartitionTrace;

const BLOCK_DOMAIN: u8 = 0x4b;

/// Content hash of a block's member list.
pub fn block_fingerprint(members: &[VertexId]) -> Id128 {
    let mut h = IdHasher::with_domain(BLOCK_DOMAIN);
    h.write_u64(members.len() as u64);
    for &v in members {
        h.write_u32(v);
    }
    h.finish()
}

/// Blocks already used as splitters, identified by content.
#[derive(Clone, Debug, Default)]
pub struct SplitterLedger {
    used: HashSet<Id128>,
}

impl SplitterLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `block`; false when it was recorded before.
    pub fn insert(&mut self, block: &[VertexId]) -> bool {
        self.used.insert(block_fingerprint(block))
    }

    pub fn contains(&self, block: &[VertexId]) -> bool {
        self.used.contains(&block_fingerprint(block))
    }

    pub fn len(&self) -> usize {
        self.used.len()
    }

    pub fn is_empty(&self) -> bool {
        self.used.is_empty()
    }
}

/// Mutable partition with scratch space for repeated splits.
struct Refiner {
    blocks: Vec<Vec<VertexId>>,
    block_of: Vec<BlockId>,
    stamp: Vec<u32>,
    epoch: u32,
    hits: Vec<u32>,
    succ: Vec<VertexId>,
    touched: Vec<BlockId>,
}

impl Refiner {
    fn new(p: Partition) -> Self {
        let n = p.vertex_count();
        let block_of = p.block_ids().to_vec();
        let blocks = p.blocks().to_vec();
        Refiner {
            hits: vec![0; blocks.len()],
            blocks,
            block_of,
            stamp: vec![0; n],
            epoch: 0,
            succ: Vec::new(),
            touched: Vec::new(),
        }
    }

    fn mark_successors(&mut self, splitter: &[VertexId], g: &LabeledGraph) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.succ.clear();
        for &u in splitter {
            for nb in g.out_neighbors(u) {
                let w = nb.vertex as usize;
                if self.stamp[w] != self.epoch {
                    self.stamp[w] = self.epoch;
                    self.succ.push(nb.vertex);
                }
            }
        }
        self.hits.resize(self.blocks.len(), 0);
        self.touched.clear();
        for &w in &self.succ {
            let b = self.block_of[w as usize];
            if self.hits[b as usize] == 0 {
                self.touched.push(b);
            }
            self.hits[b as usize] += 1;
        }
    }

    fn split_block(&mut self, b: usize) {
        let epoch = self.epoch;
        let stamp = &self.stamp;
        let (inside, outside): (Vec<VertexId>, Vec<VertexId>) =
            self.blocks[b].iter().partition(|&&v| stamp[v as usize] == epoch);
        let new_id = self.blocks.len() as BlockId;
        for &v in &outside {
            self.block_of[v as usize] = new_id;
        }
        self.hits[b] = inside.len() as u32;
        self.blocks[b] = inside;
        self.blocks.push(outside);
        self.hits.push(0);
    }

    fn is_unstable(&self, b: usize) -> bool {
        let h = self.hits[b] as usize;
        h != 0 && h != self.blocks[b].len()
    }

    /// Splits by `N+(splitter)`; `scan_all` visits every current block
    /// instead of only those containing a successor.
    fn split_by(&mut self, splitter: &[VertexId], g: &LabeledGraph, scan_all: bool) -> bool {
        self.mark_successors(splitter, g);
        let mut changed = false;
        if scan_all {
            let mut j = 0;
            while j < self.blocks.len() {
                if self.is_unstable(j) {
                    self.split_block(j);
                    changed = true;
                }
                j += 1;
            }
        } else {
            for i in 0..self.touched.len() {
                let b = self.touched[i] as usize;
                if self.is_unstable(b) {
                    self.split_block(b);
                    changed = true;
                }
            }
        }
        for &b in &self.touched {
            self.hits[b as usize] = 0;
        }
        changed
    }

    fn block_count(&self) -> usize {
        self.blocks.len()
    }

    fn to_partition(&self) -> Partition {
        Partition::from_raw(self.block_of.clone(), self.blocks.clone())
    }

    fn into_partition(self) -> Partition {
        Partition::from_raw(self.block_of, self.blocks)
    }
}

/// The coarsest refinement of `p0` that is stable with respect to each of
/// its own blocks. Passes over the blocks in creation order, using each as a
/// splitter, until a full pass splits nothing.
pub fn naive_coarsest_partition(p0: Partition, g: &LabeledGraph) -> Partition {
    let mut r = Refiner::new(p0);
    loop {
        let mut changed = false;
        let mut j = 0;
        while j < r.blocks.len() {
            let splitter = r.blocks[j].clone();
            changed |= r.split_by(&splitter, g, false);
            j += 1;
        }
        if !changed {
            return r.into_partition();
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KaushikOptions {
    /// Skip splitters whose content was already used in an earlier sweep.
    pub use_ledger: bool,
    pub early_termination: bool,
    pub record_levels: bool,
}

impl Default for KaushikOptions {
    fn default() -> Self {
        KaushikOptions {
            use_ledger: true,
            early_termination: true,
            record_levels: false,
        }
    }
}

pub fn bisim_kaushik(g: &LabeledGraph, k: usize) -> PartitionTrace {
    bisim_kaushik_with(g, k, &KaushikOptions::default())
}

pub fn bisim_kaushik_with(g: &LabeledGraph, k: usize, opts: &KaushikOptions) -> PartitionTrace {
    let start = Instant::now();
    let initial = Partition::by_vertex_labels(g);
    let initial_block_count = initial.block_count();
    let mut levels = opts.record_levels.then(|| vec![initial.clone()]);
    let mut r = Refiner::new(initial);
    let mut ledger = SplitterLedger::new();
    let init_time = start.elapsed();

    let mut block_counts = Vec::new();
    let mut iteration_times = Vec::new();
    let mut terminated_early = false;

    for _ in 0..k {
        let t = Instant::now();
        let snapshot = r.blocks.clone();
        let mut was_split = false;
        for splitter in &snapshot {
            if opts.use_ledger && !ledger.insert(splitter) {
                continue;
            }
            was_split |= r.split_by(splitter, g, true);
        }
        block_counts.push(r.block_count());
        if let Some(l) = levels.as_mut() {
            l.push(r.to_partition());
        }
        iteration_times.push(t.elapsed());
        if !was_split && opts.early_termination {
            terminated_early = true;
            break;
        }
    }

    PartitionTrace {
        initial_block_count,
        iterations_executed: block_counts.len(),
        block_counts,
        init_time,
        iteration_times,
        partition: r.into_partition(),
        terminated_early,
        levels,
    }
}
