//! Window co-occurrence context graphs.
//!
//! The older contextual model ignores syntax: every word sharing a window
//! with an occurrence of the target is a context, and all contexts of one
//! window are pairwise linked. Noise is controlled statistically by
//! dropping the most frequent corpus words and keeping only the target's
//! most frequent contexts. Units carry no part of speech here and are
//! tagged [`Pos::X`].

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::conllu::ParsedCorpus;
use crate::error::{Error, Result};
use crate::graph::{ContextEdge, ContextGraph, ContextVertex, RelationKind};
use crate::unit::{LexicalUnit, Pos, SentenceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowSpan {
    /// Centered span of this many tokens, target included, across sentence
    /// boundaries.
    Tokens(usize),
    Sentence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub window: WindowSpan,
    /// Drop this many of the most frequent corpus units.
    pub stop_rank: usize,
    /// Keep this top fraction of the target's contexts by co-occurrence.
    pub context_quantile: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig { window: WindowSpan::Tokens(25), stop_rank: 500, context_quantile: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSentence {
    pub id: SentenceId,
    pub tokens: Vec<String>,
}

/// Surface-form token stream of a parsed corpus.
pub fn token_sentences(corpus: &ParsedCorpus, case_fold: bool) -> Vec<TokenSentence> {
    corpus
        .sentences
        .iter()
        .map(|s| TokenSentence {
            id: s.sentence.id.clone(),
            tokens: s
                .tokens
                .iter()
                .filter(|t| t.upos != Pos::Punct)
                .map(|t| if case_fold { t.form.to_lowercase() } else { t.form.clone() })
                .collect(),
        })
        .collect()
}

pub fn build_window_graph(target: &str, stream: &[TokenSentence], cfg: &WindowConfig) -> Result<ContextGraph> {
    if !(cfg.context_quantile > 0.0 && cfg.context_quantile <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "context_quantile must be in (0, 1], got {}",
            cfg.context_quantile
        )));
    }
    if cfg.window == WindowSpan::Tokens(0) {
        return Err(Error::InvalidParameter("window must span at least one token".into()));
    }

    let mut corpus_freq: HashMap<&str, u64> = HashMap::new();
    for s in stream {
        for t in &s.tokens {
            *corpus_freq.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(&str, u64)> = corpus_freq.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let stop: BTreeSet<&str> = ranked.iter().take(cfg.stop_rank).map(|(w, _)| *w).collect();

    // (sentence of the target occurrence, contexts in its window)
    let mut windows: Vec<(&SentenceId, BTreeSet<&str>)> = Vec::new();
    match cfg.window {
        WindowSpan::Sentence => {
            for s in stream {
                let hits = s.tokens.iter().filter(|t| *t == target).count();
                let ctx: BTreeSet<&str> =
                    s.tokens.iter().map(String::as_str).filter(|t| *t != target && !stop.contains(t)).collect();
                for _ in 0..hits {
                    windows.push((&s.id, ctx.clone()));
                }
            }
        }
        WindowSpan::Tokens(width) => {
            let flat: Vec<(&str, &SentenceId)> =
                stream.iter().flat_map(|s| s.tokens.iter().map(move |t| (t.as_str(), &s.id))).collect();
            let before = (width - 1) / 2;
            let after = width - 1 - before;
            for (i, &(tok, sid)) in flat.iter().enumerate() {
                if tok != target {
                    continue;
                }
                let lo = i.saturating_sub(before);
                let hi = (i + after).min(flat.len() - 1);
                let ctx = flat[lo..=hi].iter().map(|(t, _)| *t).filter(|t| *t != target && !stop.contains(t)).collect();
                windows.push((sid, ctx));
            }
        }
    }

    let mut cooc: BTreeMap<&str, u64> = BTreeMap::new();
    for (_, ctx) in &windows {
        for t in ctx {
            *cooc.entry(t).or_insert(0) += 1;
        }
    }
    let mut by_freq: Vec<(&str, u64)> = cooc.into_iter().collect();
    by_freq.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let keep = (cfg.context_quantile * by_freq.len() as f64).ceil() as usize;
    let mut kept: Vec<(&str, u64)> = by_freq.into_iter().take(keep).collect();
    kept.sort_by(|a, b| a.0.cmp(b.0));
    let position: HashMap<&str, usize> = kept.iter().enumerate().map(|(i, (w, _))| (*w, i)).collect();

    let mut support: Vec<BTreeSet<SentenceId>> = vec![BTreeSet::new(); kept.len()];
    let mut edges: BTreeMap<(usize, usize), ContextEdge> = BTreeMap::new();
    for (sid, ctx) in &windows {
        let idx: Vec<usize> = ctx.iter().filter_map(|t| position.get(t).copied()).collect();
        for (k, &i) in idx.iter().enumerate() {
            support[i].insert((*sid).clone());
            for &j in &idx[k + 1..] {
                let key = (i.min(j), i.max(j));
                edges
                    .entry(key)
                    .or_insert_with(|| ContextEdge { kind: RelationKind::Primary, support: BTreeSet::new() })
                    .support
                    .insert((*sid).clone());
            }
        }
    }

    let vertices = kept
        .iter()
        .zip(support)
        .map(|((w, f), support)| ContextVertex {
            unit: LexicalUnit::new(*w, Pos::X),
            relation: RelationKind::Primary,
            frequency: *f,
            support,
        })
        .collect();

    Ok(ContextGraph { target: LexicalUnit::new(target, Pos::X), vertices, edges, truncated: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(sentences: &[&str]) -> Vec<TokenSentence> {
        sentences
            .iter()
            .enumerate()
            .map(|(i, s)| TokenSentence {
                id: SentenceId::new("w", i as u32 + 1),
                tokens: s.split_whitespace().map(str::to_string).collect(),
            })
            .collect()
    }

    fn open() -> WindowConfig {
        WindowConfig { window: WindowSpan::Sentence, stop_rank: 0, context_quantile: 1.0 }
    }

    fn vertex_keys(g: &ContextGraph) -> Vec<&str> {
        g.vertices.iter().map(|v| v.unit.key.as_str()).collect()
    }

    #[test]
    fn sentence_window() {
        let g = build_window_graph("t", &stream(&["a t b"]), &open()).unwrap();
        assert_eq!(vertex_keys(&g), ["a", "b"]);
        assert_eq!(g.edges.len(), 1);
        assert!(g.edge(0, 1).is_some());
    }

    #[test]
    fn frequent_corpus_words_dropped() {
        let s = stream(&["le t chat", "le chien", "le x", "le t y"]);
        let cfg = WindowConfig { stop_rank: 1, ..open() };
        let g = build_window_graph("t", &s, &cfg).unwrap();
        assert_eq!(vertex_keys(&g), ["chat", "y"]);
    }

    #[test]
    fn rare_contexts_dropped_by_quantile() {
        // a co-occurs 3 times, b twice, c and d once: top 25% of 4 keeps a
        let s = stream(&["t a b", "t a b", "t a c", "t d"]);
        let cfg = WindowConfig { context_quantile: 0.25, ..open() };
        let g = build_window_graph("t", &s, &cfg).unwrap();
        assert_eq!(vertex_keys(&g), ["a"]);
        let cfg = WindowConfig { context_quantile: 0.5, ..open() };
        let g = build_window_graph("t", &s, &cfg).unwrap();
        assert_eq!(vertex_keys(&g), ["a", "b"]);
        assert_eq!(g.vertices[0].frequency, 3);
    }

    #[test]
    fn token_window_spans_sentences() {
        let s = stream(&["a b", "t", "c d"]);
        let cfg = WindowConfig { window: WindowSpan::Tokens(3), ..open() };
        let g = build_window_graph("t", &s, &cfg).unwrap();
        assert_eq!(vertex_keys(&g), ["b", "c"]);
        assert_eq!(g.vertices[0].support, BTreeSet::from([SentenceId::new("w", 2)]));
    }

    #[test]
    fn bad_quantile() {
        let cfg = WindowConfig { context_quantile: 0.0, ..open() };
        assert!(build_window_graph("t", &stream(&["t a"]), &cfg).is_err());
        assert_eq!(WindowConfig::default().window, WindowSpan::Tokens(25));
    }
}
