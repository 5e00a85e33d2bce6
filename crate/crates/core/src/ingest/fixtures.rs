//! The two-universities, three-employees example graph used throughout the
//! tests and as golden fixture.

use super::{parse_ntriples_str, IngestionConfig};
use crate::graph::{LabeledGraph, Term, Triple};

pub const EX: &str = "http://example.org/";

/// 8 relational statements followed by 5 type statements.
pub const EXAMPLE_NTRIPLES: &str = r#"# two universities and three employees
<http://example.org/asc> <http://example.org/name> "Ansgar Scherp" .
<http://example.org/asc> <http://example.org/worksAt> <http://example.org/uulm> .
<http://example.org/dri> <http://example.org/name> "David Richerby" .
<http://example.org/dri> <http://example.org/worksAt> <http://example.org/uess> .
<http://example.org/jra> <http://example.org/name> "Jannik Rau" .
<http://example.org/jra> <http://example.org/worksAt> <http://example.org/uulm> .
<http://example.org/uess> <http://example.org/name> "University of Essex" .
<http://example.org/uulm> <http://example.org/name> "University of Ulm" .

<http://example.org/asc> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/Professor> .
<http://example.org/dri> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/Lecturer> .
<http://example.org/jra> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/Student> .
<http://example.org/uess> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/Organization> .
<http://example.org/uulm> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/Organization> .
"#;

pub fn example_graph() -> LabeledGraph {
    parse_ntriples_str(EXAMPLE_NTRIPLES, &IngestionConfig::default()).expect("example graph parses")
}

pub fn example_triples() -> Vec<Triple> {
    EXAMPLE_NTRIPLES
        .lines()
        .filter_map(|l| super::parse_line(l).expect("example line parses"))
        .collect()
}

/// Canonical term text for a short example name: `asc` for IRIs, or the
/// literal text such as `Jannik Rau`.
pub fn example_term(name: &str) -> String {
    if name.contains(' ') {
        Term::literal(name).to_ntriples()
    } else {
        Term::iri(format!("{EX}{name}")).to_ntriples()
    }
}

/// The five literal vertices.
pub const LITERALS: [&str; 5] = [
    "Ansgar Scherp",
    "David Richerby",
    "Jannik Rau",
    "University of Essex",
    "University of Ulm",
];
