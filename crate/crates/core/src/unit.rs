//! Vertex and sentence identities shared by every stage.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Coarse part-of-speech tags (Universal Dependencies UPOS).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pos {
    Adj,
    Adp,
    Adv,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl Pos {
    pub const ALL: [Pos; 17] = [
        Pos::Adj,
        Pos::Adp,
        Pos::Adv,
        Pos::Aux,
        Pos::Cconj,
        Pos::Det,
        Pos::Intj,
        Pos::Noun,
        Pos::Num,
        Pos::Part,
        Pos::Pron,
        Pos::Propn,
        Pos::Punct,
        Pos::Sconj,
        Pos::Sym,
        Pos::Verb,
        Pos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Adj => "ADJ",
            Pos::Adp => "ADP",
            Pos::Adv => "ADV",
            Pos::Aux => "AUX",
            Pos::Cconj => "CCONJ",
            Pos::Det => "DET",
            Pos::Intj => "INTJ",
            Pos::Noun => "NOUN",
            Pos::Num => "NUM",
            Pos::Part => "PART",
            Pos::Pron => "PRON",
            Pos::Propn => "PROPN",
            Pos::Punct => "PUNCT",
            Pos::Sconj => "SCONJ",
            Pos::Sym => "SYM",
            Pos::Verb => "VERB",
            Pos::X => "X",
        }
    }

    /// Closed-class tags dropped by default during ingestion.
    pub fn default_function_words() -> Vec<Pos> {
        vec![Pos::Det, Pos::Adp, Pos::Pron, Pos::Aux, Pos::Cconj, Pos::Sconj, Pos::Part, Pos::Intj, Pos::Punct]
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.to_ascii_uppercase();
        Pos::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == upper)
            .ok_or_else(|| Error::InvalidUnit(format!("unknown part of speech {s:?}")))
    }
}

impl Serialize for Pos {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Pos {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A lemma (or surface form) together with its part of speech.
///
/// Identity is the `(key, pos)` pair, so homographs across parts of speech
/// stay distinct. The textual form is `key#POS`, e.g. `cercle#NOUN`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexicalUnit {
    pub key: String,
    pub pos: Pos,
}

impl LexicalUnit {
    pub fn new(key: impl Into<String>, pos: Pos) -> Self {
        LexicalUnit { key: key.into(), pos }
    }
}

impl fmt::Display for LexicalUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.key, self.pos)
    }
}

impl FromStr for LexicalUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (key, pos) =
            s.rsplit_once('#').ok_or_else(|| Error::InvalidUnit(format!("expected key#POS, got {s:?}")))?;
        if key.is_empty() {
            return Err(Error::InvalidUnit(format!("empty key in {s:?}")));
        }
        Ok(LexicalUnit::new(key, pos.parse()?))
    }
}

impl Serialize for LexicalUnit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LexicalUnit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sentence identifier: document id plus 1-based ordinal, written `doc:n`.
///
/// Ordering is by document, then numerically by ordinal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SentenceId {
    pub doc: String,
    pub ordinal: u32,
}

impl SentenceId {
    pub fn new(doc: impl Into<String>, ordinal: u32) -> Self {
        SentenceId { doc: doc.into(), ordinal }
    }
}

impl fmt::Display for SentenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.doc, self.ordinal)
    }
}

impl FromStr for SentenceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (doc, n) =
            s.rsplit_once(':').ok_or_else(|| Error::InvalidUnit(format!("expected doc:ordinal, got {s:?}")))?;
        let ordinal = n.parse().map_err(|_| Error::InvalidUnit(format!("bad sentence ordinal in {s:?}")))?;
        Ok(SentenceId::new(doc, ordinal))
    }
}

impl Serialize for SentenceId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SentenceId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
