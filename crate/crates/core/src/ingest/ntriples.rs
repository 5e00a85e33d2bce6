//! Line-oriented N-Triples reader and writer.
//!
//! Supports IRIs, blank nodes, and plain, language-tagged and typed
//! literals with the standard string escapes. Files ending in `.gz` are
//! transparently (de)compressed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use super::{IngestError, IngestionConfig};
use crate::graph::{escape_iri, GraphBuilder, LabeledGraph, LiteralTag, Term, Triple};

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char, what: &str) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(format!("expected {what} at column {}", self.pos + 1))
        }
    }

    fn unicode_escape(&mut self, digits: usize) -> Result<char, String> {
        let start = self.pos;
        let hex = self.rest().get(..digits).ok_or("truncated unicode escape")?;
        let code = u32::from_str_radix(hex, 16).map_err(|_| format!("bad unicode escape at column {}", start + 1))?;
        self.pos += digits;
        char::from_u32(code).ok_or_else(|| format!("invalid code point U+{code:X}"))
    }

    fn iri(&mut self) -> Result<String, String> {
        self.expect('<', "`<`")?;
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated IRI".into()),
                Some('>') => break,
                Some('\\') => match self.bump() {
                    Some('u') => out.push(self.unicode_escape(4)?),
                    Some('U') => out.push(self.unicode_escape(8)?),
                    _ => return Err("invalid escape in IRI".into()),
                },
                Some(c) if c == ' ' || c == '<' || c == '"' => {
                    return Err(format!("invalid character {c:?} in IRI"))
                }
                Some(c) => out.push(c),
            }
        }
        if out.is_empty() {
            return Err("empty IRI".into());
        }
        Ok(out)
    }

    fn blank(&mut self) -> Result<String, String> {
        self.expect('_', "`_:`")?;
        self.expect(':', "`_:`")?;
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || "_-.".contains(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        // A trailing '.' belongs to the statement terminator.
        while self.pos > start && self.s[..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        if self.pos == start {
            return Err("empty blank node label".into());
        }
        Ok(self.s[start..self.pos].to_owned())
    }

    fn literal(&mut self) -> Result<Term, String> {
        self.expect('"', "`\"`")?;
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated literal".into()),
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.unicode_escape(4)?,
                        Some('U') => self.unicode_escape(8)?,
                        None => return Err("unterminated literal".into()),
                        Some(c) => return Err(format!("invalid escape `\\{c}` in literal")),
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        let tag = if self.eat('@') {
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                self.pos += 1;
            }
            if self.pos == start {
                return Err("empty language tag".into());
            }
            LiteralTag::Lang(self.s[start..self.pos].to_owned())
        } else if self.rest().starts_with("^^") {
            self.pos += 2;
            LiteralTag::Datatype(self.iri()?)
        } else {
            LiteralTag::Plain
        };
        Ok(Term::Literal { lexical, tag })
    }

    fn subject(&mut self) -> Result<Term, String> {
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri()?)),
            Some('_') => Ok(Term::Blank(self.blank()?)),
            _ => Err(format!("expected IRI or blank node subject at column {}", self.pos + 1)),
        }
    }

    fn object(&mut self) -> Result<Term, String> {
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri()?)),
            Some('_') => Ok(Term::Blank(self.blank()?)),
            Some('"') => self.literal(),
            _ => Err(format!("expected object term at column {}", self.pos + 1)),
        }
    }
}

/// Parses one N-Triples line. Blank and comment lines yield `Ok(None)`.
pub fn parse_line(line: &str) -> Result<Option<Triple>, String> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let mut c = Cursor { s: line, pos: 0 };
    c.skip_ws();
    if c.peek().is_none() || c.peek() == Some('#') {
        return Ok(None);
    }
    let subject = c.subject()?;
    c.skip_ws();
    let predicate = c.iri()?;
    c.skip_ws();
    let object = c.object()?;
    c.skip_ws();
    c.expect('.', "`.` ending the statement")?;
    c.skip_ws();
    if !(c.peek().is_none() || c.peek() == Some('#')) {
        return Err(format!("unexpected text after statement at column {}", c.pos + 1));
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

/// Streams statements from `reader` into `builder`. Blank node labels are
/// prefixed with `blank_scope` when given, so several files can share one
/// builder without joining their blank nodes. Returns the statement count.
pub fn read_ntriples_into<R: BufRead>(
    reader: R,
    builder: &mut GraphBuilder,
    blank_scope: Option<&str>,
) -> Result<usize, IngestError> {
    let mut count = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let parsed = parse_line(&line).map_err(|message| IngestError::Parse { line: i + 1, message })?;
        if let Some(mut t) = parsed {
            if let Some(scope) = blank_scope {
                for term in [&mut t.subject, &mut t.object] {
                    if let Term::Blank(b) = term {
                        *b = format!("{scope}{b}");
                    }
                }
            }
            builder.add_triple(&t)?;
            count += 1;
        }
    }
    Ok(count)
}

pub fn parse_ntriples<R: Read>(reader: R, config: &IngestionConfig) -> Result<LabeledGraph, IngestError> {
    config.validate()?;
    let mut b = GraphBuilder::new(config);
    read_ntriples_into(BufReader::new(reader), &mut b, None)?;
    Ok(b.build())
}

pub fn parse_ntriples_str(text: &str, config: &IngestionConfig) -> Result<LabeledGraph, IngestError> {
    parse_ntriples(text.as_bytes(), config)
}

fn is_gzip(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

/// Loads and merges one or more files. Blank nodes are scoped per file.
pub fn load_ntriples_files<P: AsRef<Path>>(
    paths: &[P],
    config: &IngestionConfig,
) -> Result<LabeledGraph, IngestError> {
    config.validate()?;
    let mut b = GraphBuilder::new(config);
    for (i, path) in paths.iter().enumerate() {
        let path = path.as_ref();
        let file = File::open(path)?;
        let scope = (paths.len() > 1).then(|| format!("f{i}_"));
        let reader: Box<dyn Read> = if is_gzip(path) {
            Box::new(MultiGzDecoder::new(file))
        } else {
            Box::new(file)
        };
        read_ntriples_into(BufReader::with_capacity(1 << 16, reader), &mut b, scope.as_deref())?;
    }
    Ok(b.build())
}

fn label_ntriples(label: &str) -> String {
    if label.starts_with('"') || label.starts_with("_:") {
        label.to_owned()
    } else {
        let mut out = String::from("<");
        escape_iri(label, &mut out);
        out.push('>');
        out
    }
}

/// Writes type statements for every non-literal vertex, then one statement
/// per (edge, label). Vertices with neither labels nor edges are not
/// representable and are dropped.
pub fn write_ntriples<W: Write>(g: &LabeledGraph, config: &IngestionConfig, mut w: W) -> std::io::Result<()> {
    let dict = g.label_dict();
    let type_pred = label_ntriples(&config.type_predicate);
    for v in g.vertices() {
        if g.is_literal(v) {
            continue;
        }
        for label in dict.vertex.set_labels(g.vertex_labels(v)) {
            writeln!(w, "{} {} {} .", g.term(v), type_pred, label_ntriples(label))?;
        }
    }
    let preds: Vec<String> = dict.edge.labels().map(label_ntriples).collect();
    for (u, x, l) in g.edges() {
        for &p in dict.edge.set(l) {
            writeln!(w, "{} {} {} .", g.term(u), preds[p as usize], g.term(x))?;
        }
    }
    Ok(())
}

pub fn save_ntriples(g: &LabeledGraph, path: &Path, config: &IngestionConfig) -> std::io::Result<()> {
    let file = BufWriter::new(File::create(path)?);
    if is_gzip(path) {
        let mut enc = GzEncoder::new(file, Compression::fast());
        write_ntriples(g, config, &mut enc)?;
        enc.finish()?.flush()
    } else {
        let mut file = file;
        write_ntriples(g, config, &mut file)?;
        file.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::fixtures::{example_graph, EX};
    use crate::ingest::{generate_synthetic, GeneratorParams};

    #[test]
    fn example_labels() {
        let g = example_graph();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 8);
        let d = &g.label_dict().vertex;
        let jra = g.vertex_by_term(&format!("<{EX}jra>")).unwrap();
        let uulm = g.vertex_by_term(&format!("<{EX}uulm>")).unwrap();
        assert_eq!(d.set_labels(g.vertex_labels(jra)), vec![format!("{EX}Student").as_str()]);
        assert_eq!(d.set_labels(g.vertex_labels(uulm)), vec![format!("{EX}Organization").as_str()]);
    }

    #[test]
    fn comments_only() {
        let g = parse_ntriples_str("# nothing\n\n   # here\n", &IngestionConfig::default()).unwrap();
        assert_eq!(g.vertex_count(), 0);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "<a:x> <a:p> <a:y> .\n<a:x> <a:p> .\n";
        match parse_ntriples_str(text, &IngestionConfig::default()) {
            Err(IngestError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unterminated_literal() {
        let err = parse_line(r#"<a:x> <a:p> "abc ."#).unwrap_err();
        assert!(err.contains("unterminated literal"), "{err}");
        let err = parse_ntriples_str("<a:x> <a:p> \"abc\\", &IngestionConfig::default()).unwrap_err();
        assert!(err.to_string().contains("unterminated literal"));
    }

    #[test]
    fn literal_forms_and_escapes() {
        let t = parse_line(r#"_:b1 <a:p> "x\"y\né"@en-GB ."#).unwrap().unwrap();
        assert_eq!(t.subject, Term::blank("b1"));
        assert_eq!(
            t.object,
            Term::Literal {
                lexical: "x\"y\né".into(),
                tag: LiteralTag::Lang("en-GB".into())
            }
        );
        let t = parse_line(r#"<a:s> <a:p> "5"^^<http://www.w3.org/2001/XMLSchema#int>.  # trailing"#)
            .unwrap()
            .unwrap();
        assert_eq!(
            t.object,
            Term::Literal {
                lexical: "5".into(),
                tag: LiteralTag::Datatype("http://www.w3.org/2001/XMLSchema#int".into())
            }
        );
        let t = parse_line("<a:s> <a:p> _:o.").unwrap().unwrap();
        assert_eq!(t.object, Term::blank("o"));
        assert!(parse_line("<a:s> <a:p> <a:o> . extra").is_err());
        assert!(parse_line("\"lit\" <a:p> <a:o> .").is_err());
    }

    #[test]
    fn escaped_terms_round_trip_through_text() {
        let t = Triple::new(
            Term::iri("http://x/a b"),
            "http://x/p",
            Term::Literal {
                lexical: "tab\there \"q\" \\ \u{1}".into(),
                tag: LiteralTag::Plain,
            },
        );
        let line = format!("{} <http://x/p> {} .", t.subject.to_ntriples(), t.object.to_ntriples());
        assert_eq!(parse_line(&line).unwrap().unwrap(), t);
    }

    #[test]
    fn blank_nodes_are_scoped_per_file() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.nt");
        let b = dir.path().join("b.nt.gz");
        std::fs::write(&a, "_:x <a:p> <a:o> .\n").unwrap();
        let g = parse_ntriples_str("_:x <a:p> <a:o> .\n", &IngestionConfig::default()).unwrap();
        save_ntriples(&g, &b, &IngestionConfig::default()).unwrap();
        let merged = load_ntriples_files(&[&a, &b], &IngestionConfig::default()).unwrap();
        assert_eq!(merged.vertex_count(), 3);
        let single = load_ntriples_files(&[&b], &IngestionConfig::default()).unwrap();
        assert!(single.same_structure(&g));
    }

    #[test]
    fn generated_file_round_trips() {
        let g = generate_synthetic(&GeneratorParams {
            vertex_count: 2000,
            edge_count: 10_000,
            edge_labels: 6,
            vertex_labels: 10,
            max_labels_per_vertex: 3,
            skew: 1.0,
            seed: 42,
        })
        .unwrap();
        let cfg = IngestionConfig::default();
        let mut buf = Vec::new();
        write_ntriples(&g, &cfg, &mut buf).unwrap();
        let lines = buf.iter().filter(|&&b| b == b'\n').count();
        assert!(lines >= 10_000);
        let back = parse_ntriples(buf.as_slice(), &cfg).unwrap();
        // Isolated unlabeled vertices have no N-Triples representation.
        let represented = g
            .vertices()
            .filter(|&v| {
                !g.out_neighbors(v).is_empty()
                    || !g.in_neighbors(v).is_empty()
                    || !g.label_dict().vertex.set(g.vertex_labels(v)).is_empty()
            })
            .count();
        assert_eq!(back.vertex_count(), represented);
        let mut again = Vec::new();
        write_ntriples(&back, &cfg, &mut again).unwrap();
        let third = parse_ntriples(again.as_slice(), &cfg).unwrap();
        assert!(third.same_structure(&back));
        assert_eq!(back.triple_count(), g.triple_count());
    }

    #[test]
    fn example_round_trips() {
        let g = example_graph();
        let cfg = IngestionConfig::default();
        let mut buf = Vec::new();
        write_ntriples(&g, &cfg, &mut buf).unwrap();
        let back = parse_ntriples(buf.as_slice(), &cfg).unwrap();
        assert!(back.same_structure(&g));
    }
}
