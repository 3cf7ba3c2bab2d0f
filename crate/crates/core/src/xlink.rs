//! Cross-lingual alignment of sense cliques through a bilingual dictionary.
//!
//! Selecting a source word first selects the target-language entries of
//! all its dictionary translations. Every context of every source clique
//! is then translated in all known ways, and each target clique of those
//! entries is scored by the fraction of source contexts whose translation
//! it contains. A link is accepted only when a *single* target clique
//! reaches the threshold: translations scattered over several weakly
//! overlapping cliques never add up.
//!
//! Dictionary lookups fold case and ignore part of speech.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::clique::{Clique, CliqueId};
use crate::error::{Error, Result};
use crate::store::{sentences_for_clique, Atlas};
use crate::unit::{LexicalUnit, SentenceId};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilingualDictionary {
    pub source_lang: String,
    pub target_lang: String,
    pub entries: BTreeMap<String, BTreeSet<String>>,
}

fn fold(key: &str) -> String {
    key.to_lowercase()
}

impl BilingualDictionary {
    pub fn new(source_lang: impl Into<String>, target_lang: impl Into<String>) -> Self {
        BilingualDictionary {
            source_lang: source_lang.into(),
            target_lang: target_lang.into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, source: &str, target: &str) {
        self.entries.entry(fold(source)).or_default().insert(fold(target));
    }

    pub fn translations(&self, key: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(&fold(key))
    }

    pub fn translation_count(&self) -> usize {
        self.entries.values().map(BTreeSet::len).sum()
    }

    /// The reverse-direction dictionary.
    pub fn inverse(&self) -> Self {
        let mut inv = BilingualDictionary::new(&self.target_lang, &self.source_lang);
        for (s, ts) in &self.entries {
            for t in ts {
                inv.insert(t, s);
            }
        }
        inv
    }
}

/// Reads `source<TAB>target` lines. Blank lines and `#` comments are
/// skipped; duplicate pairs collapse.
pub fn load_dictionary(reader: impl BufRead, source_lang: &str, target_lang: &str) -> Result<BilingualDictionary> {
    let mut dict = BilingualDictionary::new(source_lang, target_lang);
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        match fields.as_slice() {
            [s, t] if !s.is_empty() && !t.is_empty() => dict.insert(s, t),
            _ => {
                return Err(Error::MalformedDictionary {
                    line: idx + 1,
                    reason: format!("expected two tab-separated fields, got {line:?}"),
                })
            }
        }
    }
    Ok(dict)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberTranslation {
    pub unit: LexicalUnit,
    /// Empty when the dictionary has no entry for the member.
    pub candidates: BTreeSet<String>,
}

impl MemberTranslation {
    pub fn translatable(&self) -> bool {
        !self.candidates.is_empty()
    }
}

pub fn translate_clique(clique: &Clique, dict: &BilingualDictionary) -> Vec<MemberTranslation> {
    clique
        .members
        .iter()
        .map(|m| MemberTranslation {
            unit: m.clone(),
            candidates: dict.translations(&m.key).cloned().unwrap_or_default(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkParams {
    /// Minimum fraction of source contexts found in one target clique.
    pub theta: f64,
    /// Minimum number of matched source contexts.
    pub overlap_min: usize,
}

impl Default for LinkParams {
    fn default() -> Self {
        LinkParams { theta: 0.5, overlap_min: 3 }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidParameter(format!("theta must be in (0, 1], got {}", self.theta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenseLink {
    pub source_word: LexicalUnit,
    pub source_clique: CliqueId,
    pub target_word: LexicalUnit,
    pub target_clique: CliqueId,
    /// (source member, target member) pairs that translate each other.
    pub matched: Vec<(LexicalUnit, LexicalUnit)>,
    /// Distinct source members with a translation in the target clique.
    pub matched_count: usize,
    pub source_size: usize,
    pub score: f64,
    pub accepted: bool,
}

fn score_pair(
    source_word: &LexicalUnit,
    source: &Clique,
    translations: &[MemberTranslation],
    target: &Clique,
    params: &LinkParams,
) -> Option<SenseLink> {
    let folded: Vec<String> = target.members.iter().map(|m| fold(&m.key)).collect();
    let mut matched = Vec::new();
    let mut matched_count = 0;
    for tr in translations {
        let before = matched.len();
        for (tm, key) in target.members.iter().zip(&folded) {
            if tr.candidates.contains(key) {
                matched.push((tr.unit.clone(), tm.clone()));
            }
        }
        if matched.len() > before {
            matched_count += 1;
        }
    }
    if matched_count == 0 {
        return None;
    }
    let score = matched_count as f64 / source.members.len() as f64;
    Some(SenseLink {
        source_word: source_word.clone(),
        source_clique: source.id.clone(),
        target_word: target.target.clone(),
        target_clique: target.id.clone(),
        matched,
        matched_count,
        source_size: source.members.len(),
        score,
        accepted: score >= params.theta && matched_count >= params.overlap_min,
    })
}

fn link_cliques<'a>(
    source_word: &LexicalUnit,
    source_cliques: impl IntoIterator<Item = &'a Clique>,
    target: &Atlas,
    dict: &BilingualDictionary,
    params: &LinkParams,
) -> Vec<SenseLink> {
    let Some(word_translations) = dict.translations(&source_word.key) else {
        return Vec::new();
    };
    let candidates: Vec<&Clique> = target
        .entries
        .iter()
        .filter(|(u, _)| word_translations.contains(&fold(&u.key)))
        .flat_map(|(_, e)| e.cliques.iter())
        .collect();

    let mut links = Vec::new();
    for sc in source_cliques {
        let translations = translate_clique(sc, dict);
        links.extend(candidates.iter().filter_map(|tc| score_pair(source_word, sc, &translations, tc, params)));
    }
    sort_links(&mut links);
    links
}

fn sort_links(links: &mut [SenseLink]) {
    links.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(b.accepted.cmp(&a.accepted))
            .then_with(|| a.source_clique.cmp(&b.source_clique))
            .then_with(|| a.target_clique.cmp(&b.target_clique))
    });
}

/// Scores every (source clique, candidate target clique) pair with at least
/// one match, best first.
pub fn match_cliques(
    source: &Atlas,
    word: &LexicalUnit,
    target: &Atlas,
    dict: &BilingualDictionary,
    params: &LinkParams,
) -> Result<Vec<SenseLink>> {
    params.validate()?;
    let entry = source.entries.get(word).ok_or_else(|| Error::NotFound(format!("source entry {word}")))?;
    Ok(link_cliques(word, &entry.cliques, target, dict, params))
}

/// [`match_cliques`] over every source entry matching `word`, which may be
/// `key#POS` or a bare key.
pub fn link_word(
    source: &Atlas,
    word: &str,
    target: &Atlas,
    dict: &BilingualDictionary,
    params: &LinkParams,
) -> Result<Vec<SenseLink>> {
    params.validate()?;
    let units: Vec<LexicalUnit> = match word.parse::<LexicalUnit>() {
        Ok(u) if source.entries.contains_key(&u) => vec![u],
        _ => source.units_with_key(word).cloned().collect(),
    };
    if units.is_empty() {
        return Err(Error::NotFound(format!("source entry {word}")));
    }
    let mut links = Vec::new();
    for u in &units {
        links.extend(match_cliques(source, u, target, dict, params)?);
    }
    sort_links(&mut links);
    Ok(links)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkedSentences {
    pub link: SenseLink,
    pub sentences: Vec<(SentenceId, String)>,
}

/// Target-language sentences reachable from one source clique, grouped by
/// accepted link.
pub fn cross_navigate(
    source: &Atlas,
    clique: &CliqueId,
    target: &Atlas,
    dict: &BilingualDictionary,
    params: &LinkParams,
) -> Result<Vec<LinkedSentences>> {
    params.validate()?;
    let sc = source.clique(clique).ok_or_else(|| Error::NotFound(format!("clique {clique}")))?;
    link_cliques(&sc.target, [sc], target, dict, params)
        .into_iter()
        .filter(|l| l.accepted)
        .map(|link| {
            let sentences = sentences_for_clique(target, &link.target_clique)?;
            Ok(LinkedSentences { link, sentences })
        })
        .collect()
}
