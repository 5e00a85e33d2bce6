//! Graph summary model specifications and their textual form.
//!
//! ```text
//! spec  := "cp" "(" cse "," depth ")"
//! cse   := "(" atom "," atom "," atom ")" [ "^-1" | "⁻¹" ]
//!        | "inv" "(" atom "," atom "," atom ")"
//! depth := [ "k" "=" ] integer
//! atom  := "T" | "id" | "OC" | "OC_type"
//! ```
//!
//! The predicate atom must be `T` or `id`. `OC` is accepted as shorthand
//! for `OC_type`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelationAtom {
    /// Relates every pair of vertices.
    Tautology,
    /// Relates each vertex only to itself.
    Identity,
    /// Relates vertices with equal vertex-label sets.
    LabelEquality,
}

impl RelationAtom {
    pub fn symbol(self) -> &'static str {
        match self {
            RelationAtom::Tautology => "T",
            RelationAtom::Identity => "id",
            RelationAtom::LabelEquality => "OC_type",
        }
    }
}

impl fmt::Display for RelationAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GsmSpec {
    pub subject: RelationAtom,
    pub predicate: RelationAtom,
    pub object: RelationAtom,
    pub k: usize,
    /// Evaluate over reversed edges.
    pub inverted: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GsmSpecError {
    #[error("unexpected {found} at offset {offset}, expected {expected}")]
    Unexpected {
        offset: usize,
        found: String,
        expected: &'static str,
    },
    #[error("unknown relation atom '{token}' at offset {offset} (expected T, id, OC or OC_type)")]
    UnknownAtom { offset: usize, token: String },
    #[error("predicate atom '{token}' at offset {offset} must be T or id")]
    InvalidPredicate { offset: usize, token: String },
    #[error("invalid depth '{token}' at offset {offset}")]
    InvalidDepth { offset: usize, token: String },
}

impl GsmSpec {
    pub fn new(subject: RelationAtom, predicate: RelationAtom, object: RelationAtom, k: usize, inverted: bool) -> Self {
        GsmSpec {
            subject,
            predicate,
            object,
            k,
            inverted,
        }
    }

    /// `cp((T,id,T),k)`
    pub fn schaetzle(k: usize) -> Self {
        GsmSpec::new(RelationAtom::Tautology, RelationAtom::Identity, RelationAtom::Tautology, k, false)
    }

    /// `cp((OC_type,T,OC_type)^-1,k)`
    pub fn kaushik(k: usize) -> Self {
        GsmSpec::new(RelationAtom::LabelEquality, RelationAtom::Tautology, RelationAtom::LabelEquality, k, true)
    }

    pub fn with_k(&self, k: usize) -> Self {
        GsmSpec { k, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), GsmSpecError> {
        if self.predicate == RelationAtom::LabelEquality {
            return Err(GsmSpecError::InvalidPredicate {
                offset: 0,
                token: self.predicate.symbol().to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for GsmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.inverted { "inv(" } else { "(" };
        write!(f, "cp({open}{},{},{}),k={})", self.subject, self.predicate, self.object, self.k)
    }
}

impl FromStr for GsmSpec {
    type Err = GsmSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser::new(s)?.spec()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Punct(char),
    Inverse,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "token '{w}'"),
            Tok::Punct(c) => write!(f, "token '{c}'"),
            Tok::Inverse => f.write_str("token '^-1'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, GsmSpecError> {
    let mut out = Vec::new();
    let mut it = s.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let mut w = String::new();
            while let Some(&(_, c)) = it.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    w.push(c);
                    it.next();
                } else {
                    break;
                }
            }
            out.push((i, Tok::Word(w)));
        } else if c == '^' {
            it.next();
            let rest: String = s[i + 1..].chars().take(2).collect();
            if rest == "-1" {
                it.next();
                it.next();
                out.push((i, Tok::Inverse));
            } else {
                return Err(GsmSpecError::Unexpected {
                    offset: i,
                    found: "token '^'".into(),
                    expected: "'^-1'",
                });
            }
        } else if c == '⁻' {
            it.next();
            match it.next() {
                Some((_, '¹')) => out.push((i, Tok::Inverse)),
                _ => {
                    return Err(GsmSpecError::Unexpected {
                        offset: i,
                        found: "token '⁻'".into(),
                        expected: "'⁻¹'",
                    })
                }
            }
        } else if "(),=".contains(c) {
            it.next();
            out.push((i, Tok::Punct(c)));
        } else {
            return Err(GsmSpecError::Unexpected {
                offset: i,
                found: format!("token '{c}'"),
                expected: "a word, integer or one of ( ) , =",
            });
        }
    }
    out.push((s.len(), Tok::End));
    Ok(out)
}

impl Parser {
    fn new(s: &str) -> Result<Self, GsmSpecError> {
        Ok(Parser {
            toks: tokenize(s)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &(usize, Tok) {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> GsmSpecError {
        let (offset, tok) = self.peek();
        GsmSpecError::Unexpected {
            offset: *offset,
            found: tok.to_string(),
            expected,
        }
    }

    fn punct(&mut self, c: char, expected: &'static str) -> Result<(), GsmSpecError> {
        if self.peek().1 == Tok::Punct(c) {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn word(&mut self, w: &str, expected: &'static str) -> Result<(), GsmSpecError> {
        if self.peek().1 == Tok::Word(w.into()) {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn spec(&mut self) -> Result<GsmSpec, GsmSpecError> {
        self.word("cp", "'cp'")?;
        self.punct('(', "'('")?;
        let inverted_prefix = if self.peek().1 == Tok::Word("inv".into()) {
            self.next();
            true
        } else {
            false
        };
        self.punct('(', "'(' opening the schema element")?;
        let subject = self.atom()?;
        self.punct(',', "','")?;
        let (p_offset, _) = *self.peek();
        let predicate = self.atom()?;
        self.punct(',', "','")?;
        let object = self.atom()?;
        self.punct(')', "')' closing the schema element")?;
        let inverted_suffix = !inverted_prefix && self.peek().1 == Tok::Inverse;
        if inverted_suffix {
            self.next();
        }
        self.punct(',', "',' before the depth")?;
        let k = self.depth()?;
        self.punct(')', "')'")?;
        if self.peek().1 != Tok::End {
            return Err(self.unexpected("end of input"));
        }
        if predicate == RelationAtom::LabelEquality {
            return Err(GsmSpecError::InvalidPredicate {
                offset: p_offset,
                token: predicate.symbol().into(),
            });
        }
        Ok(GsmSpec::new(subject, predicate, object, k, inverted_prefix || inverted_suffix))
    }

    fn atom(&mut self) -> Result<RelationAtom, GsmSpecError> {
        match self.next() {
            (_, Tok::Word(w)) if w == "T" => Ok(RelationAtom::Tautology),
            (_, Tok::Word(w)) if w == "id" => Ok(RelationAtom::Identity),
            (_, Tok::Word(w)) if w == "OC" || w == "OC_type" => Ok(RelationAtom::LabelEquality),
            (offset, Tok::Word(w)) => Err(GsmSpecError::UnknownAtom { offset, token: w }),
            (offset, t) => Err(GsmSpecError::Unexpected {
                offset,
                found: t.to_string(),
                expected: "a relation atom",
            }),
        }
    }

    fn depth(&mut self) -> Result<usize, GsmSpecError> {
        if self.peek().1 == Tok::Word("k".into()) {
            self.next();
            self.punct('=', "'=' after k")?;
        }
        match self.next() {
            (offset, Tok::Word(w)) => w.parse().map_err(|_| GsmSpecError::InvalidDepth { offset, token: w }),
            (offset, t) => Err(GsmSpecError::Unexpected {
                offset,
                found: t.to_string(),
                expected: "a depth",
            }),
        }
    }
}
