//! Iterative signature hashing for the edge-labeled forward k-bisimulation.
//!
//! Iteration `i` assigns every vertex the hash of its signature, the set of
//! `(edge label set, block id)` pairs over its out-edges under the ids of
//! iteration `i - 1`. All vertices start in one block with id 0. The loop
//! stops early once the number of distinct ids stops growing; blocks can
//! only split, so an unchanged count means an unchanged partition.
//!
//! Within an iteration vertices are processed in parallel against the
//! immutable previous id array; iterations are separated by a barrier.

use std::time::Instant;

use rayon::prelude::*;

use crate::graph::{LabelSetId, LabeledGraph, VertexId};
use crate::hashing::{check_preimages, HashCollision, Id128, IdHasher};
use crate::partition::Partition;
use crate::trace::PartitionTrace;

const SIGNATURE_DOMAIN: u8 = 0x53;

/// Canonically ordered, duplicate-free set of `(label set, block id)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature(Vec<(LabelSetId, Id128)>);

impl Signature {
    pub fn new(mut pairs: Vec<(LabelSetId, Id128)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        Signature(pairs)
    }

    pub fn pairs(&self) -> &[(LabelSetId, Id128)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The block id this signature maps to.
    pub fn id(&self) -> Id128 {
        let mut h = IdHasher::with_domain(SIGNATURE_DOMAIN);
        h.write_u64(self.0.len() as u64);
        for &(l, b) in &self.0 {
            h.write_u32(l.0);
            h.write_id(b);
        }
        h.finish()
    }
}

/// Block identifier of every vertex for one iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockIdMap(Vec<Id128>);

impl BlockIdMap {
    /// Every vertex in the single initial block, id 0.
    pub fn initial(n: usize) -> Self {
        BlockIdMap(vec![0; n])
    }

    pub fn from_vec(ids: Vec<Id128>) -> Self {
        BlockIdMap(ids)
    }

    pub fn get(&self, v: VertexId) -> Id128 {
        self.0[v as usize]
    }

    pub fn as_slice(&self) -> &[Id128] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn signature_of(v: VertexId, g: &LabeledGraph, ids: &BlockIdMap) -> Signature {
    Signature::new(
        g.out_neighbors(v)
            .iter()
            .map(|nb| (nb.labels, ids.get(nb.vertex)))
            .collect(),
    )
}

#[derive(Clone, Copy, Debug)]
pub struct SchaetzleOptions {
    /// Verify that equal ids imply equal signatures in every iteration.
    pub exact: bool,
    pub early_termination: bool,
    pub record_levels: bool,
}

impl Default for SchaetzleOptions {
    fn default() -> Self {
        SchaetzleOptions {
            exact: false,
            early_termination: true,
            record_levels: false,
        }
    }
}

pub fn bisim_schaetzle(g: &LabeledGraph, k: usize) -> PartitionTrace {
    bisim_schaetzle_with(g, k, &SchaetzleOptions::default()).expect("collision checks are disabled")
}

pub fn bisim_schaetzle_with(
    g: &LabeledGraph,
    k: usize,
    opts: &SchaetzleOptions,
) -> Result<PartitionTrace, HashCollision> {
    let start = Instant::now();
    let n = g.vertex_count();
    let mut ids = BlockIdMap::initial(n);
    let initial = Partition::single_block(n);
    let initial_block_count = initial.block_count();
    let mut levels = opts.record_levels.then(|| vec![initial.clone()]);
    let init_time = start.elapsed();

    let mut partition = initial;
    let mut prev_count = initial_block_count;
    let mut block_counts = Vec::new();
    let mut iteration_times = Vec::new();
    let mut terminated_early = false;

    for i in 1..=k {
        let t = Instant::now();
        let next: Vec<Id128> = (0..n as VertexId)
            .into_par_iter()
            .map(|v| signature_of(v, g, &ids).id())
            .collect();
        if opts.exact {
            verify_signatures(g, &ids, &next, i)?;
        }
        let mut keyed: Vec<(Id128, VertexId)> = next.par_iter().enumerate().map(|(v, &id)| (id, v as VertexId)).collect();
        keyed.par_sort_unstable();
        let count = distinct_sorted(&keyed);
        ids = BlockIdMap::from_vec(next);
        block_counts.push(count);

        let stable = count == prev_count;
        let last = (stable && opts.early_termination) || i == k;
        if last || levels.is_some() {
            partition = Partition::from_sorted_ids(n, &keyed);
            if let Some(l) = levels.as_mut() {
                l.push(partition.clone());
            }
        }
        iteration_times.push(t.elapsed());
        if stable && opts.early_termination {
            terminated_early = true;
            break;
        }
        prev_count = count;
    }

    Ok(PartitionTrace {
        initial_block_count,
        iterations_executed: block_counts.len(),
        block_counts,
        init_time,
        iteration_times,
        partition,
        terminated_early,
        levels,
    })
}

pub(crate) fn distinct_sorted(keyed: &[(Id128, VertexId)]) -> usize {
    if keyed.is_empty() {
        return 0;
    }
    1 + keyed.windows(2).filter(|w| w[0].0 != w[1].0).count()
}

fn verify_signatures(g: &LabeledGraph, prev: &BlockIdMap, next: &[Id128], iteration: usize) -> Result<(), HashCollision> {
    check_preimages(next, |v| signature_of(v, g, prev), iteration, "signature")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, tests::random_triples, Term, Triple};
    use crate::ingest::fixtures::{example_graph, example_term, LITERALS};
    use crate::ingest::IngestionConfig;
    use crate::oracle::oracle_edge_labeled_forward;
    use crate::oracle::tests::test_graph;
    use crate::partition::partitions_equal;
    use crate::partition::tests::named_partition;

    fn exact() -> SchaetzleOptions {
        SchaetzleOptions {
            exact: true,
            record_levels: true,
            ..Default::default()
        }
    }

    #[test]
    fn example_signature_at_level_zero() {
        let g = example_graph();
        let jra = g.vertex_by_term(&example_term("jra")).unwrap();
        let sig = signature_of(jra, &g, &BlockIdMap::initial(10));
        let d = &g.label_dict().edge;
        let name = d.find_set(&["http://example.org/name"]).unwrap();
        let works = d.find_set(&["http://example.org/worksAt"]).unwrap();
        assert_eq!(sig, Signature::new(vec![(works, 0), (name, 0)]));
    }

    #[test]
    fn sink_has_empty_signature() {
        let g = example_graph();
        let lit = g.vertex_by_term(&example_term("Jannik Rau")).unwrap();
        assert!(signature_of(lit, &g, &BlockIdMap::initial(10)).is_empty());
    }

    #[test]
    fn signature_matches_edge_list() {
        let g = test_graph(4, 100, 400);
        let ids = BlockIdMap::from_vec((0..100u128).map(|i| i % 7).collect());
        for v in g.vertices() {
            let mut want: Vec<(LabelSetId, Id128)> = g
                .edges()
                .filter(|&(u, _, _)| u == v)
                .map(|(_, w, l)| (l, ids.get(w)))
                .collect();
            want.sort();
            want.dedup();
            assert_eq!(signature_of(v, &g, &ids).pairs(), want.as_slice());
        }
    }

    #[test]
    fn example_stops_after_second_iteration() {
        let g = example_graph();
        let t = bisim_schaetzle_with(&g, 10, &exact()).unwrap();
        assert!(t.terminated_early);
        assert_eq!(t.iterations_executed, 2);
        assert_eq!(t.block_counts, vec![3, 3]);
        let want = named_partition(&g, &[&["asc", "dri", "jra"], &["uess", "uulm"], &LITERALS]);
        assert!(partitions_equal(&t.partition, &want).unwrap());
        assert!(t.is_monotone());
    }

    #[test]
    fn edgeless_graph_is_one_block() {
        let triples = (0..5).map(|i| Triple::new(Term::iri(format!("v{i}")), crate::ingest::RDF_TYPE, Term::iri("C")));
        let g = build_graph(triples, &IngestionConfig::default()).unwrap();
        let t = bisim_schaetzle(&g, 4);
        assert_eq!(t.block_count(), 1);
        assert!(t.terminated_early);
        assert_eq!(t.iterations_executed, 1);
    }

    #[test]
    fn zero_levels_is_the_initial_block() {
        let g = example_graph();
        let t = bisim_schaetzle(&g, 0);
        assert_eq!(t.block_count(), 1);
        assert_eq!(t.iterations_executed, 0);
    }

    #[test]
    fn agrees_with_oracle() {
        for seed in 0..30 {
            let g = if seed % 2 == 0 {
                test_graph(seed, 150, 400)
            } else {
                build_graph(random_triples(seed, 500, 120, 3), &IngestionConfig::default()).unwrap()
            };
            for k in 0..=5 {
                let t = bisim_schaetzle_with(&g, k, &exact()).unwrap();
                assert!(t.is_monotone());
                assert!(partitions_equal(&t.partition, &oracle_edge_labeled_forward(&g, k)).unwrap(), "seed {seed} k {k}");
            }
        }
    }

    #[test]
    fn early_stop_is_a_fixpoint() {
        for seed in 0..20 {
            let g = test_graph(seed, 120, 200);
            let t = bisim_schaetzle(&g, 12);
            if t.terminated_early {
                let forced = bisim_schaetzle_with(
                    &g,
                    t.iterations_executed + 1,
                    &SchaetzleOptions {
                        early_termination: false,
                        ..Default::default()
                    },
                )
                .unwrap();
                assert!(partitions_equal(&t.partition, &forced.partition).unwrap());
            }
        }
    }
}
