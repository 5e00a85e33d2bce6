//! Stratified k-bisimulation partitions of multi-relational labeled graphs.
//!
//! Four families of algorithms share one graph model and one partition type:
//!
//! - [`schaetzle`]: iterative signature hashing for the edge-labeled forward
//!   k-bisimulation, parallel within each iteration.
//! - [`kaushik`]: sequential split-based stabilization for the vertex-labeled
//!   backward k-bisimulation, plus the naive relational-coarsest-partition
//!   baseline.
//! - [`brs`]: a generic vertex-centric summarizer driven by a declarative
//!   graph summary model ([`brs::GsmSpec`]).
//! - [`oracle`]: literal level-wise evaluations of the four bisimulation
//!   definitions, used as ground truth.
//!
//! [`bench`] runs experiments (warm-up plus measured runs) and emits
//! per-iteration timing and peak-memory reports.

pub mod bench;
pub mod brs;
pub mod graph;
pub mod hashing;
pub mod ingest;
pub mod kaushik;
pub mod oracle;
pub mod partition;
pub mod schaetzle;
pub mod trace;

pub use graph::{
    build_graph, GraphBuilder, GraphError, GraphStats, LabelDictionary, LabelSetId, LabeledGraph,
    Neighbor, Term, TermKind, Triple, VertexId,
};
pub use ingest::{IngestionConfig, IngestError};
pub use partition::{is_refinement, is_stable, partitions_equal, split, Partition, PartitionError};
pub use trace::PartitionTrace;
