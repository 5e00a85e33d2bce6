//! N-Triples ingestion and seeded synthetic graph generation.

pub mod fixtures;
mod generator;
mod ntriples;

use thiserror::Error;

use crate::graph::GraphError;

pub use generator::{generate_synthetic, GeneratorParams};
pub use ntriples::{
    load_ntriples_files, parse_line, parse_ntriples, parse_ntriples_str, read_ntriples_into,
    save_ntriples, write_ntriples,
};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// How RDF statements map onto the labeled graph model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IngestionConfig {
    /// Statements with this predicate label their subject instead of
    /// creating an edge.
    pub type_predicate: String,
    /// Vertex label given to every literal vertex.
    pub literal_label: String,
    /// Store one edge record per predicate instead of one per vertex pair.
    pub explode_label_sets: bool,
}

impl Default for IngestionConfig {
    fn default() -> Self {
        IngestionConfig {
            type_predicate: RDF_TYPE.to_owned(),
            literal_label: "Literal".to_owned(),
            explode_label_sets: false,
        }
    }
}

impl IngestionConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        let p = &self.type_predicate;
        let scheme_ok = p
            .split_once(':')
            .map(|(scheme, _)| {
                !scheme.is_empty()
                    && scheme.starts_with(|c: char| c.is_ascii_alphabetic())
                    && scheme.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c))
            })
            .unwrap_or(false);
        let chars_ok = !p.chars().any(|c| c.is_whitespace() || "<>\"{}|^`\\".contains(c));
        if scheme_ok && chars_ok {
            Ok(())
        } else {
            Err(IngestError::Config(format!("type predicate `{p}` is not a valid IRI")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_predicate_must_be_an_iri() {
        assert!(IngestionConfig::default().validate().is_ok());
        for bad in ["", "type", "has space:x", "http://a b", "1http://x"] {
            let cfg = IngestionConfig {
                type_predicate: bad.into(),
                ..Default::default()
            };
            assert!(cfg.validate().is_err(), "{bad}");
        }
    }
}
