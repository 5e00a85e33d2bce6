use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Dense id of an interned label set (vertex or edge side, depending on
/// which [`LabelInterner`] produced it).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabelSetId(pub u32);

impl LabelSetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interns label strings to dense ids and sorted label-id sequences to dense
/// label-set ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelInterner {
    labels: Vec<String>,
    label_index: HashMap<String, u32>,
    sets: Vec<Box<[u32]>>,
    set_index: HashMap<Box<[u32]>, LabelSetId>,
}

impl LabelInterner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern_label(&mut self, label: &str) -> u32 {
        if let Some(&id) = self.label_index.get(label) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.labels.push(label.to_owned());
        self.label_index.insert(label.to_owned(), id);
        id
    }

    pub fn label_id(&self, label: &str) -> Option<u32> {
        self.label_index.get(label).copied()
    }

    pub fn label(&self, id: u32) -> &str {
        &self.labels[id as usize]
    }

    /// Interns a set of label ids. Order and duplicates in `ids` are ignored.
    pub fn intern_set(&mut self, ids: &[u32]) -> LabelSetId {
        let mut key = ids.to_vec();
        key.sort_unstable();
        key.dedup();
        self.intern_sorted(key.into_boxed_slice())
    }

    fn intern_sorted(&mut self, key: Box<[u32]>) -> LabelSetId {
        if let Some(&id) = self.set_index.get(&key) {
            return id;
        }
        let id = LabelSetId(self.sets.len() as u32);
        self.sets.push(key.clone());
        self.set_index.insert(key, id);
        id
    }

    /// Interns a set given by label strings.
    pub fn intern_label_set<S: AsRef<str>>(&mut self, labels: &[S]) -> LabelSetId {
        let ids: Vec<u32> = labels.iter().map(|l| self.intern_label(l.as_ref())).collect();
        self.intern_set(&ids)
    }

    /// Sorted label ids of an interned set.
    pub fn set(&self, id: LabelSetId) -> &[u32] {
        &self.sets[id.index()]
    }

    /// Label strings of an interned set, sorted by string.
    pub fn set_labels(&self, id: LabelSetId) -> Vec<&str> {
        let mut out: Vec<&str> = self.set(id).iter().map(|&l| self.label(l)).collect();
        out.sort_unstable();
        out
    }

    pub fn find_set<S: AsRef<str>>(&self, labels: &[S]) -> Option<LabelSetId> {
        let mut key = Vec::with_capacity(labels.len());
        for l in labels {
            key.push(self.label_id(l.as_ref())?);
        }
        key.sort_unstable();
        key.dedup();
        self.set_index.get(key.as_slice()).copied()
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}

/// Separate interning tables for vertex labels and edge labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelDictionary {
    pub vertex: LabelInterner,
    pub edge: LabelInterner,
}

impl LabelDictionary {
    pub fn new() -> Self {
        Self::default()
    }
}
