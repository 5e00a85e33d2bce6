//! The multi-relational labeled graph model.
//!
//! Vertices are dense `u32` ids assigned in first-seen order. Every ordered
//! vertex pair carries at most one edge record whose label set collects all
//! predicates between the pair (unless label sets are exploded at ingestion,
//! in which case each predicate becomes its own record with a singleton set).

mod dictionary;
mod stats;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::ingest::IngestionConfig;

pub use dictionary::{LabelDictionary, LabelInterner, LabelSetId};
pub use stats::{compute_statistics, GraphStats, Summary};

pub type VertexId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("term `{term}` appears both as {first} and as {second}")]
    ConflictingTermKind {
        term: String,
        first: TermKind,
        second: TermKind,
    },
    #[error("a literal cannot be the subject of a triple: {0}")]
    LiteralSubject(String),
    #[error("graph exceeds {} vertices", u32::MAX)]
    TooManyVertices,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermKind {
    Iri,
    Blank,
    Literal,
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TermKind::Iri => "an IRI",
            TermKind::Blank => "a blank node",
            TermKind::Literal => "a literal",
        })
    }
}

/// Language tag or datatype of a literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LiteralTag {
    Plain,
    Lang(String),
    Datatype(String),
}

/// An RDF term as it appears in a triple.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal { lexical: String, tag: LiteralTag },
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Term {
        Term::Iri(s.into())
    }

    pub fn blank(s: impl Into<String>) -> Term {
        Term::Blank(s.into())
    }

    pub fn literal(s: impl Into<String>) -> Term {
        Term::Literal {
            lexical: s.into(),
            tag: LiteralTag::Plain,
        }
    }

    pub fn kind(&self) -> TermKind {
        match self {
            Term::Iri(_) => TermKind::Iri,
            Term::Blank(_) => TermKind::Blank,
            Term::Literal { .. } => TermKind::Literal,
        }
    }

    /// Identity key: terms with equal keys denote the same vertex, and
    /// must agree on their kind.
    fn key(&self) -> String {
        match self {
            Term::Iri(s) => s.clone(),
            Term::Blank(s) => format!("_:{s}"),
            Term::Literal { lexical, tag } => match tag {
                LiteralTag::Plain => lexical.clone(),
                LiteralTag::Lang(l) => format!("{lexical}@{l}"),
                LiteralTag::Datatype(d) => format!("{lexical}^^{d}"),
            },
        }
    }

    /// Canonical N-Triples rendering.
    pub fn to_ntriples(&self) -> String {
        let mut out = String::new();
        match self {
            Term::Iri(s) => {
                out.push('<');
                escape_iri(s, &mut out);
                out.push('>');
            }
            Term::Blank(s) => {
                out.push_str("_:");
                out.push_str(s);
            }
            Term::Literal { lexical, tag } => {
                out.push('"');
                escape_literal(lexical, &mut out);
                out.push('"');
                match tag {
                    LiteralTag::Plain => {}
                    LiteralTag::Lang(l) => {
                        out.push('@');
                        out.push_str(l);
                    }
                    LiteralTag::Datatype(d) => {
                        out.push_str("^^<");
                        escape_iri(d, &mut out);
                        out.push('>');
                    }
                }
            }
        }
        out
    }

    /// Label string used when this term is the object of a type triple.
    fn as_label(&self) -> String {
        match self {
            Term::Iri(s) => s.clone(),
            other => other.to_ntriples(),
        }
    }
}

pub(crate) fn escape_literal(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c => out.push(c),
        }
    }
}

pub(crate) fn escape_iri(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c if (c as u32) <= 0x20 => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Term,
    /// Predicate IRI, without angle brackets.
    pub predicate: String,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: impl Into<String>, object: Term) -> Self {
        Triple {
            subject,
            predicate: predicate.into(),
            object,
        }
    }
}

/// One adjacency entry: the neighbor and the label set of the connecting edge.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Neighbor {
    pub vertex: VertexId,
    pub labels: LabelSetId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<usize>,
    entries: Vec<Neighbor>,
}

impl Adjacency {
    /// Builds CSR from `(vertex, neighbor)` pairs. The relative order of
    /// entries with the same vertex is preserved.
    fn from_pairs(n: usize, pairs: impl Iterator<Item = (VertexId, Neighbor)> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for (v, _) in pairs.clone() {
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut entries = vec![
            Neighbor {
                vertex: 0,
                labels: LabelSetId(0)
            };
            offsets[n]
        ];
        for (v, nb) in pairs {
            let slot = &mut cursor[v as usize];
            entries[*slot] = nb;
            *slot += 1;
        }
        Adjacency { offsets, entries }
    }

    fn of(&self, v: VertexId) -> &[Neighbor] {
        let v = v as usize;
        &self.entries[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// An immutable multi-relational labeled graph with forward and reverse
/// adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    terms: Vec<String>,
    term_index: HashMap<String, VertexId>,
    literal: Vec<bool>,
    vertex_labels: Vec<LabelSetId>,
    out_adj: Adjacency,
    in_adj: Adjacency,
    dict: LabelDictionary,
}

impl LabeledGraph {
    pub fn empty() -> Self {
        GraphBuilder::new(&IngestionConfig::default()).build()
    }

    pub fn vertex_count(&self) -> usize {
        self.terms.len()
    }

    /// Number of edge records (ordered pairs, or pair/label records when
    /// label sets were exploded).
    pub fn edge_count(&self) -> usize {
        self.out_adj.entries.len()
    }

    /// Number of relational triples, i.e. the sum of edge label-set sizes.
    pub fn triple_count(&self) -> usize {
        self.out_adj
            .entries
            .iter()
            .map(|nb| self.dict.edge.set(nb.labels).len())
            .sum()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.terms.len() as VertexId
    }

    pub fn out_neighbors(&self, v: VertexId) -> &[Neighbor] {
        self.out_adj.of(v)
    }

    pub fn in_neighbors(&self, v: VertexId) -> &[Neighbor] {
        self.in_adj.of(v)
    }

    /// All edge records as `(source, target, labels)`, ordered by source.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, LabelSetId)> + '_ {
        self.vertices()
            .flat_map(move |u| self.out_neighbors(u).iter().map(move |nb| (u, nb.vertex, nb.labels)))
    }

    pub fn vertex_labels(&self, v: VertexId) -> LabelSetId {
        self.vertex_labels[v as usize]
    }

    pub fn label_dict(&self) -> &LabelDictionary {
        &self.dict
    }

    /// Canonical N-Triples text of a vertex's term.
    pub fn term(&self, v: VertexId) -> &str {
        &self.terms[v as usize]
    }

    pub fn is_literal(&self, v: VertexId) -> bool {
        self.literal[v as usize]
    }

    /// Looks up a vertex by its canonical N-Triples text, e.g. `<http://x/a>`.
    pub fn vertex_by_term(&self, term: &str) -> Option<VertexId> {
        self.term_index.get(term).copied()
    }

    /// Reverses every edge; vertex labels and ids are unchanged.
    pub fn invert(&self) -> LabeledGraph {
        let mut g = self.clone();
        std::mem::swap(&mut g.out_adj, &mut g.in_adj);
        g
    }

    /// Equality up to vertex numbering and interning order: compares term
    /// names, vertex label strings, and labeled edges by name.
    pub fn same_structure(&self, other: &LabeledGraph) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    #[allow(clippy::type_complexity)]
    fn canonical_form(&self) -> (BTreeSet<(String, Vec<String>)>, BTreeSet<(String, Vec<String>, String)>) {
        let vertices = self
            .vertices()
            .map(|v| {
                let labels = self.dict.vertex.set_labels(self.vertex_labels(v));
                (self.term(v).to_owned(), labels.into_iter().map(str::to_owned).collect())
            })
            .collect();
        let edges = self
            .edges()
            .map(|(u, w, l)| {
                let labels = self.dict.edge.set_labels(l);
                (
                    self.term(u).to_owned(),
                    labels.into_iter().map(str::to_owned).collect(),
                    self.term(w).to_owned(),
                )
            })
            .collect();
        (vertices, edges)
    }
}

/// Incremental graph construction. Terms are interned in first-seen order.
pub struct GraphBuilder {
    type_predicate: String,
    literal_label: String,
    explode_label_sets: bool,
    terms: Vec<String>,
    kinds: Vec<TermKind>,
    index: HashMap<String, VertexId>,
    label_pairs: Vec<(VertexId, u32)>,
    raw_edges: Vec<(VertexId, VertexId, u32)>,
    dict: LabelDictionary,
}

impl GraphBuilder {
    pub fn new(config: &IngestionConfig) -> Self {
        GraphBuilder {
            type_predicate: config.type_predicate.clone(),
            literal_label: config.literal_label.clone(),
            explode_label_sets: config.explode_label_sets,
            terms: Vec::new(),
            kinds: Vec::new(),
            index: HashMap::new(),
            label_pairs: Vec::new(),
            raw_edges: Vec::new(),
            dict: LabelDictionary::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.terms.len()
    }

    /// Returns the vertex for `term`, creating it on first sight. Literal
    /// vertices receive the configured literal label.
    pub fn vertex(&mut self, term: &Term) -> Result<VertexId, GraphError> {
        let key = term.key();
        if let Some(&v) = self.index.get(&key) {
            let first = self.kinds[v as usize];
            if first != term.kind() {
                return Err(GraphError::ConflictingTermKind {
                    term: key,
                    first,
                    second: term.kind(),
                });
            }
            return Ok(v);
        }
        let v = self.push_vertex(term.to_ntriples(), term.kind())?;
        self.index.insert(key, v);
        Ok(v)
    }

    /// Appends a fresh vertex without identity lookup. The caller guarantees
    /// that `ntriples` is unique.
    pub fn push_vertex(&mut self, ntriples: String, kind: TermKind) -> Result<VertexId, GraphError> {
        if self.terms.len() >= u32::MAX as usize {
            return Err(GraphError::TooManyVertices);
        }
        let v = self.terms.len() as VertexId;
        self.terms.push(ntriples);
        self.kinds.push(kind);
        if kind == TermKind::Literal {
            let l = self.dict.vertex.intern_label(&self.literal_label);
            self.label_pairs.push((v, l));
        }
        Ok(v)
    }

    pub fn intern_vertex_label(&mut self, label: &str) -> u32 {
        self.dict.vertex.intern_label(label)
    }

    pub fn intern_edge_label(&mut self, label: &str) -> u32 {
        self.dict.edge.intern_label(label)
    }

    pub fn add_vertex_label(&mut self, v: VertexId, label: u32) {
        self.label_pairs.push((v, label));
    }

    pub fn add_edge(&mut self, source: VertexId, target: VertexId, label: u32) {
        self.raw_edges.push((source, target, label));
    }

    /// Adds one RDF statement. Type statements label the subject; all others
    /// contribute their predicate to the (subject, object) edge.
    pub fn add_triple(&mut self, t: &Triple) -> Result<(), GraphError> {
        if let Term::Literal { .. } = t.subject {
            return Err(GraphError::LiteralSubject(t.subject.to_ntriples()));
        }
        let s = self.vertex(&t.subject)?;
        if t.predicate == self.type_predicate {
            let l = self.intern_vertex_label(&t.object.as_label());
            self.add_vertex_label(s, l);
        } else {
            let o = self.vertex(&t.object)?;
            let p = self.intern_edge_label(&t.predicate);
            self.add_edge(s, o, p);
        }
        Ok(())
    }

    pub fn build(mut self) -> LabeledGraph {
        let n = self.terms.len();

        self.label_pairs.sort_unstable();
        self.label_pairs.dedup();
        let mut vertex_labels = Vec::with_capacity(n);
        let mut i = 0;
        for v in 0..n as VertexId {
            let start = i;
            while i < self.label_pairs.len() && self.label_pairs[i].0 == v {
                i += 1;
            }
            let ids: Vec<u32> = self.label_pairs[start..i].iter().map(|&(_, l)| l).collect();
            vertex_labels.push(self.dict.vertex.intern_set(&ids));
        }

        self.raw_edges.sort_unstable();
        self.raw_edges.dedup();
        let mut records: Vec<(VertexId, VertexId, LabelSetId)> = Vec::new();
        if self.explode_label_sets {
            for &(s, o, p) in &self.raw_edges {
                records.push((s, o, self.dict.edge.intern_set(&[p])));
            }
        } else {
            let mut i = 0;
            let mut preds = Vec::new();
            while i < self.raw_edges.len() {
                let (s, o, _) = self.raw_edges[i];
                preds.clear();
                while i < self.raw_edges.len() && self.raw_edges[i].0 == s && self.raw_edges[i].1 == o {
                    preds.push(self.raw_edges[i].2);
                    i += 1;
                }
                records.push((s, o, self.dict.edge.intern_set(&preds)));
            }
        }
        drop(std::mem::take(&mut self.raw_edges));

        let out_adj = Adjacency::from_pairs(
            n,
            records.iter().map(|&(s, o, l)| (s, Neighbor { vertex: o, labels: l })),
        );
        let in_adj = Adjacency::from_pairs(
            n,
            records.iter().map(|&(s, o, l)| (o, Neighbor { vertex: s, labels: l })),
        );

        let literal = self.kinds.iter().map(|&k| k == TermKind::Literal).collect();
        let term_index = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as VertexId))
            .collect();
        LabeledGraph {
            terms: self.terms,
            term_index,
            literal,
            vertex_labels,
            out_adj,
            in_adj,
            dict: self.dict,
        }
    }
}

/// Builds a graph from a stream of triples.
pub fn build_graph<I>(triples: I, config: &IngestionConfig) -> Result<LabeledGraph, GraphError>
where
    I: IntoIterator<Item = Triple>,
{
    let mut b = GraphBuilder::new(config);
    for t in triples {
        b.add_triple(&t)?;
    }
    Ok(b.build())
}
