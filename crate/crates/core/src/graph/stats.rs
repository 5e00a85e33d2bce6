use serde::{Deserialize, Serialize};

use super::LabeledGraph;

/// Mean, population standard deviation and maximum of a per-vertex quantity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub max: u64,
}

impl Summary {
    fn of(values: impl Iterator<Item = u64> + Clone) -> Summary {
        let n = values.clone().count();
        if n == 0 {
            return Summary::default();
        }
        let mean = values.clone().map(|x| x as f64).sum::<f64>() / n as f64;
        let var = values.clone().map(|x| (x as f64 - mean).powi(2)).sum::<f64>() / n as f64;
        Summary {
            mean,
            sd: var.sqrt(),
            max: values.max().unwrap_or(0),
        }
    }
}

/// Dataset statistics. Edge counts and degrees are measured in triples: an
/// edge record with label set `{p, q}` counts twice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    /// |V|
    pub vertices: usize,
    /// |E| as relational triples.
    pub edges: usize,
    /// Edge records (distinct ordered pairs unless label sets were exploded).
    pub edge_records: usize,
    /// |Σ_V|
    pub vertex_labels: usize,
    /// |rng(l_V)|: distinct vertex label sets in use.
    pub vertex_label_sets: usize,
    /// |l_V(v)| over all vertices.
    pub labels_per_vertex: Summary,
    /// |Σ_E|
    pub edge_labels: usize,
    pub self_loops: usize,
    /// Total degree; a self-loop adds one.
    pub degree: Summary,
    pub in_degree: Summary,
    pub out_degree: Summary,
}

pub fn compute_statistics(g: &LabeledGraph) -> GraphStats {
    let dict = g.label_dict();
    let n = g.vertex_count();
    let mut indeg = vec![0u64; n];
    let mut outdeg = vec![0u64; n];
    let mut loops = vec![0u64; n];
    let mut edges = 0usize;
    let mut self_loops = 0usize;
    for (u, w, l) in g.edges() {
        let t = dict.edge.set(l).len() as u64;
        outdeg[u as usize] += t;
        indeg[w as usize] += t;
        if u == w {
            loops[u as usize] += t;
            self_loops += t as usize;
        }
        edges += t as usize;
    }
    let total: Vec<u64> = (0..n).map(|v| indeg[v] + outdeg[v] - loops[v]).collect();

    let mut sets: Vec<_> = g.vertices().map(|v| g.vertex_labels(v)).collect();
    sets.sort_unstable();
    sets.dedup();

    GraphStats {
        vertices: n,
        edges,
        edge_records: g.edge_count(),
        vertex_labels: dict.vertex.label_count(),
        vertex_label_sets: sets.len(),
        labels_per_vertex: Summary::of(g.vertices().map(|v| dict.vertex.set(g.vertex_labels(v)).len() as u64)),
        edge_labels: dict.edge.label_count(),
        self_loops,
        degree: Summary::of(total.iter().copied()),
        in_degree: Summary::of(indeg.iter().copied()),
        out_degree: Summary::of(outdeg.iter().copied()),
    }
}
