//! Reader for CoNLL-U style dependency files.
//!
//! Each sentence is a block of tab-separated token lines terminated by a
//! blank line. Only ID, FORM, LEMMA, UPOS, HEAD and DEPREL are read, so any
//! line with at least eight columns is accepted. Multi-word ranges (`1-2`)
//! and empty nodes (`1.1`) are skipped and counted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::unit::{Pos, SentenceId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub id: SentenceId,
    pub text: String,
    pub language: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: u32,
    pub form: String,
    /// `None` when the LEMMA column is `_`.
    pub lemma: Option<String>,
    pub upos: Pos,
    pub head: u32,
    pub deprel: String,
}

/// A dependency arc between two tokens of the same sentence, as indexes
/// into [`ParsedSentence::tokens`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawArc {
    pub head: usize,
    pub dependent: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    pub sentence: Sentence,
    pub tokens: Vec<Token>,
    pub arcs: Vec<RawArc>,
}

impl ParsedSentence {
    pub fn relation(&self, arc: &RawArc) -> &str {
        &self.tokens[arc.dependent].deprel
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostics {
    pub multiword_ranges: usize,
    pub empty_nodes: usize,
    pub unknown_pos: usize,
}

impl ParseDiagnostics {
    pub fn merge(&mut self, other: &ParseDiagnostics) {
        self.multiword_ranges += other.multiword_ranges;
        self.empty_nodes += other.empty_nodes;
        self.unknown_pos += other.unknown_pos;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedCorpus {
    pub sentences: Vec<ParsedSentence>,
    pub diagnostics: ParseDiagnostics,
}

/// Parses a whole document. Sentence ids are `doc:1`, `doc:2`, ... in block
/// order.
pub fn parse_corpus(input: &str, doc: &str, lang: &str) -> Result<ParsedCorpus> {
    let mut out = ParsedCorpus::default();
    let mut block = Block::default();

    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            block.finish(doc, lang, &mut out)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(text) = comment.trim_start().strip_prefix("text") {
                if let Some(text) = text.trim_start().strip_prefix('=') {
                    block.text = Some(text.trim().to_string());
                }
            }
            continue;
        }
        block.push_line(line, line_no, &mut out.diagnostics)?;
    }
    block.finish(doc, lang, &mut out)?;
    Ok(out)
}

#[derive(Default)]
struct Block {
    text: Option<String>,
    tokens: Vec<Token>,
    started: bool,
}

impl Block {
    fn push_line(&mut self, line: &str, line_no: usize, diag: &mut ParseDiagnostics) -> Result<()> {
        let cols: Vec<&str> = line.split('\t').collect();
        let malformed = |reason: String| Error::MalformedLine { line: line_no, reason };
        if cols.len() < 8 {
            return Err(malformed(format!("expected at least 8 columns, found {}", cols.len())));
        }
        self.started = true;
        let id = cols[0];
        if id.contains('-') {
            diag.multiword_ranges += 1;
            return Ok(());
        }
        if id.contains('.') {
            diag.empty_nodes += 1;
            return Ok(());
        }
        let id: u32 = id.parse().map_err(|_| malformed(format!("non-numeric ID {id:?}")))?;
        let head: u32 = cols[6].parse().map_err(|_| malformed(format!("non-numeric HEAD {:?}", cols[6])))?;
        let upos = match cols[3].parse() {
            Ok(p) => p,
            Err(_) => {
                diag.unknown_pos += 1;
                Pos::X
            }
        };
        let lemma = match cols[2] {
            "_" | "" => None,
            l => Some(l.to_string()),
        };
        self.tokens.push(Token { id, form: cols[1].to_string(), lemma, upos, head, deprel: cols[7].to_string() });
        Ok(())
    }

    fn finish(&mut self, doc: &str, lang: &str, out: &mut ParsedCorpus) -> Result<()> {
        let block = std::mem::take(self);
        if !block.started {
            return Ok(());
        }
        let id = SentenceId::new(doc, out.sentences.len() as u32 + 1);
        let text =
            block.text.unwrap_or_else(|| block.tokens.iter().map(|t| t.form.as_str()).collect::<Vec<_>>().join(" "));

        let mut arcs = Vec::new();
        for (dep_idx, tok) in block.tokens.iter().enumerate() {
            if tok.head == 0 {
                continue;
            }
            let head_idx = block.tokens.iter().position(|t| t.id == tok.head).ok_or_else(|| Error::DanglingHead {
                sentence: id.to_string(),
                token: tok.id,
                head: tok.head,
            })?;
            arcs.push(RawArc { head: head_idx, dependent: dep_idx });
        }

        if text.trim().is_empty() {
            return Ok(());
        }
        out.sentences.push(ParsedSentence {
            sentence: Sentence { id, text, language: lang.to_string() },
            tokens: block.tokens,
            arcs,
        });
        Ok(())
    }
}
