//! Vertex partitions and the refinement, stability and split primitives
//! shared by all algorithms.
//!
//! Block ids are dense but carry no meaning across partitions; compare
//! partitions with [`partitions_equal`], never by block id.

use std::collections::HashMap;
use std::hash::Hash;

use fixedbitset::FixedBitSet;
use rayon::slice::ParallelSliceMut;
use thiserror::Error;

use crate::graph::{LabelSetId, LabeledGraph, VertexId};
use crate::hashing::Id128;

pub type BlockId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("partitions cover different vertex counts ({left} vs {right})")]
    VertexCountMismatch { left: usize, right: usize },
    #[error("invalid block list: {0}")]
    InvalidBlocks(String),
}

/// An assignment of every vertex to exactly one non-empty block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    block_of: Vec<BlockId>,
    blocks: Vec<Vec<VertexId>>,
}

impl Partition {
    /// `{V}`, or no blocks at all for the empty vertex set.
    pub fn single_block(n: usize) -> Self {
        if n == 0 {
            return Partition::from_raw(Vec::new(), Vec::new());
        }
        Partition::from_raw(vec![0; n], vec![(0..n as VertexId).collect()])
    }

    pub fn singletons(n: usize) -> Self {
        Partition::from_raw((0..n as BlockId).collect(), (0..n as VertexId).map(|v| vec![v]).collect())
    }

    pub(crate) fn from_raw(block_of: Vec<BlockId>, blocks: Vec<Vec<VertexId>>) -> Self {
        Partition { block_of, blocks }
    }

    /// Groups vertices by equal key; blocks are numbered in order of their
    /// smallest member.
    pub fn from_keys<K: Hash + Eq>(keys: &[K]) -> Self {
        let mut index: HashMap<&K, BlockId> = HashMap::new();
        let mut blocks: Vec<Vec<VertexId>> = Vec::new();
        let mut block_of = Vec::with_capacity(keys.len());
        for (v, k) in keys.iter().enumerate() {
            let b = *index.entry(k).or_insert_with(|| {
                blocks.push(Vec::new());
                (blocks.len() - 1) as BlockId
            });
            blocks[b as usize].push(v as VertexId);
            block_of.push(b);
        }
        Partition::from_raw(block_of, blocks)
    }

    /// Same result as [`Partition::from_keys`] for 128-bit identifiers, via a
    /// parallel sort instead of a hash map.
    pub fn from_ids(ids: &[Id128]) -> Self {
        let mut keyed: Vec<(Id128, VertexId)> = ids.iter().enumerate().map(|(v, &id)| (id, v as VertexId)).collect();
        keyed.par_sort_unstable();
        Self::from_sorted_ids(ids.len(), &keyed)
    }

    /// Builds the partition from `(id, vertex)` pairs sorted by id then vertex.
    pub(crate) fn from_sorted_ids(n: usize, keyed: &[(Id128, VertexId)]) -> Self {
        let mut blocks: Vec<Vec<VertexId>> = Vec::new();
        let mut i = 0;
        while i < keyed.len() {
            let id = keyed[i].0;
            let start = i;
            while i < keyed.len() && keyed[i].0 == id {
                i += 1;
            }
            blocks.push(keyed[start..i].iter().map(|&(_, v)| v).collect());
        }
        blocks.par_sort_unstable_by_key(|b| b[0]);
        let mut block_of = vec![0; n];
        for (b, members) in blocks.iter().enumerate() {
            for &v in members {
                block_of[v as usize] = b as BlockId;
            }
        }
        Partition::from_raw(block_of, blocks)
    }

    /// Validates and adopts an explicit block list.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<VertexId>>) -> Result<Self, PartitionError> {
        let mut block_of = vec![BlockId::MAX; n];
        for (b, members) in blocks.iter().enumerate() {
            if members.is_empty() {
                return Err(PartitionError::InvalidBlocks(format!("block {b} is empty")));
            }
            for &v in members {
                let slot = block_of
                    .get_mut(v as usize)
                    .ok_or_else(|| PartitionError::InvalidBlocks(format!("vertex {v} out of range")))?;
                if *slot != BlockId::MAX {
                    return Err(PartitionError::InvalidBlocks(format!("vertex {v} in two blocks")));
                }
                *slot = b as BlockId;
            }
        }
        if let Some(v) = block_of.iter().position(|&b| b == BlockId::MAX) {
            return Err(PartitionError::InvalidBlocks(format!("vertex {v} not covered")));
        }
        Ok(Partition::from_raw(block_of, blocks))
    }

    /// Groups vertices by vertex-label set.
    pub fn by_vertex_labels(g: &LabeledGraph) -> Self {
        let keys: Vec<LabelSetId> = g.vertices().map(|v| g.vertex_labels(v)).collect();
        Partition::from_keys(&keys)
    }

    pub fn vertex_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, v: VertexId) -> BlockId {
        self.block_of[v as usize]
    }

    pub fn block_ids(&self) -> &[BlockId] {
        &self.block_of
    }

    pub fn block(&self, b: BlockId) -> &[VertexId] {
        &self.blocks[b as usize]
    }

    pub fn blocks(&self) -> &[Vec<VertexId>] {
        &self.blocks
    }

    /// Blocks with sorted members, ordered by smallest member.
    pub fn canonical_blocks(&self) -> Vec<Vec<VertexId>> {
        let mut out: Vec<Vec<VertexId>> = self
            .blocks
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.sort_unstable();
                b
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Canonical text export: one line per block with its members' term
    /// strings sorted and tab-separated; lines ordered by smallest member.
    pub fn export(&self, g: &LabeledGraph) -> String {
        let mut lines: Vec<Vec<&str>> = self
            .blocks
            .iter()
            .map(|b| {
                let mut names: Vec<&str> = b.iter().map(|&v| g.term(v)).collect();
                names.sort_unstable();
                names
            })
            .collect();
        lines.sort_unstable();
        let mut out = String::new();
        for names in lines {
            out.push_str(&names.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn refines(&self, coarse: &Partition) -> Result<bool, PartitionError> {
        is_refinement(self, coarse)
    }

    pub fn is_valid(&self) -> bool {
        Partition::from_blocks(self.vertex_count(), self.blocks.clone())
            .map(|p| p.block_of == self.block_of)
            .unwrap_or(false)
    }
}

fn check_sizes(a: &Partition, b: &Partition) -> Result<(), PartitionError> {
    if a.vertex_count() != b.vertex_count() {
        return Err(PartitionError::VertexCountMismatch {
            left: a.vertex_count(),
            right: b.vertex_count(),
        });
    }
    Ok(())
}

/// True iff every block of `fine` lies inside one block of `coarse`.
pub fn is_refinement(fine: &Partition, coarse: &Partition) -> Result<bool, PartitionError> {
    check_sizes(fine, coarse)?;
    Ok(fine.blocks.iter().all(|b| {
        let target = coarse.block_of(b[0]);
        b.iter().all(|&v| coarse.block_of(v) == target)
    }))
}

/// Equality up to block renaming.
pub fn partitions_equal(a: &Partition, b: &Partition) -> Result<bool, PartitionError> {
    Ok(is_refinement(a, b)? && is_refinement(b, a)?)
}

/// `N+(S)`: every vertex with an incoming edge from `splitter`.
pub fn successors(splitter: &[VertexId], g: &LabeledGraph) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(g.vertex_count());
    for &u in splitter {
        for nb in g.out_neighbors(u) {
            set.insert(nb.vertex as usize);
        }
    }
    set
}

fn block_is_stable(block: &[VertexId], succ: &FixedBitSet) -> bool {
    let hits = block.iter().filter(|&&v| succ.contains(v as usize)).count();
    hits == 0 || hits == block.len()
}

/// True iff every block of `p` is either inside `N+(splitter)` or disjoint
/// from it.
pub fn is_stable(p: &Partition, splitter: &[VertexId], g: &LabeledGraph) -> bool {
    let succ = successors(splitter, g);
    p.blocks.iter().all(|b| block_is_stable(b, &succ))
}

/// True iff `p` is stable with respect to each of its own blocks.
pub fn is_stable_partition(p: &Partition, g: &LabeledGraph) -> bool {
    p.blocks.iter().all(|b| is_stable(p, b, g))
}

/// Replaces each block `B` that is unstable with respect to `splitter` by
/// `B ∩ N+(S)` (in place) and `B − N+(S)` (appended).
pub fn split(splitter: &[VertexId], p: &Partition, g: &LabeledGraph) -> Partition {
    let succ = successors(splitter, g);
    let mut blocks = Vec::with_capacity(p.blocks.len());
    let mut appended = Vec::new();
    for b in &p.blocks {
        if block_is_stable(b, &succ) {
            blocks.push(b.clone());
        } else {
            let (inside, outside): (Vec<VertexId>, Vec<VertexId>) =
                b.iter().partition(|&&v| succ.contains(v as usize));
            blocks.push(inside);
            appended.push(outside);
        }
    }
    blocks.extend(appended);
    let mut block_of = vec![0; p.vertex_count()];
    for (i, b) in blocks.iter().enumerate() {
        for &v in b {
            block_of[v as usize] = i as BlockId;
        }
    }
    Partition::from_raw(block_of, blocks)
}

/// The quotient summary graph: one vertex per block and one edge per
/// distinct (source block, label set, target block).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGraph {
    pub block_count: usize,
    pub edges: Vec<(BlockId, LabelSetId, BlockId)>,
}

pub fn quotient(g: &LabeledGraph, p: &Partition) -> QuotientGraph {
    let mut edges: Vec<_> = g
        .edges()
        .map(|(u, w, l)| (p.block_of(u), l, p.block_of(w)))
        .collect();
    edges.par_sort_unstable();
    edges.dedup();
    QuotientGraph {
        block_count: p.block_count(),
        edges,
    }
}
