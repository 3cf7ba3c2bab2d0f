//! Corpus ingestion: CoNLL-U in, content-word dependency table out.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conllu::{parse_corpus, ParseDiagnostics, ParsedSentence, Sentence, Token};
use crate::error::{Error, Result};
use crate::format;
use crate::unit::{LexicalUnit, Pos, SentenceId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub lemmatize_nouns: bool,
    pub lemmatize_verbs: bool,
    pub function_word_pos: BTreeSet<Pos>,
    /// Proper nouns are never folded.
    pub case_fold: bool,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            lemmatize_nouns: true,
            lemmatize_verbs: true,
            function_word_pos: Pos::default_function_words().into_iter().collect(),
            case_fold: true,
        }
    }
}

impl IngestConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    fn wants_lemma(&self, pos: Pos) -> bool {
        match pos {
            Pos::Noun | Pos::Propn => self.lemmatize_nouns,
            Pos::Verb | Pos::Aux => self.lemmatize_verbs,
            _ => true,
        }
    }

    /// Maps a token to its lexical unit. `None` when a lemma is required but
    /// missing.
    pub fn normalize(&self, token: &Token) -> Option<LexicalUnit> {
        let raw = if self.wants_lemma(token.upos) { token.lemma.as_deref()? } else { token.form.as_str() };
        let key = if self.case_fold && token.upos != Pos::Propn { raw.to_lowercase() } else { raw.to_string() };
        if key.is_empty() {
            return None;
        }
        Some(LexicalUnit::new(key, token.upos))
    }
}

/// One syntactic relation between two content words.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DependencyRecord {
    pub head: LexicalUnit,
    pub dependent: LexicalUnit,
    pub relation: String,
    pub sentence: SentenceId,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestDiagnostics {
    #[serde(flatten)]
    pub parse: ParseDiagnostics,
    pub function_word_arcs: usize,
    pub missing_lemma: usize,
}

impl IngestDiagnostics {
    pub fn merge(&mut self, other: &IngestDiagnostics) {
        self.parse.merge(&other.parse);
        self.function_word_arcs += other.function_word_arcs;
        self.missing_lemma += other.missing_lemma;
    }
}

/// Drops arcs touching function words and normalizes the survivors.
///
/// Output follows arc order. Arcs whose endpoint lacks a required lemma are
/// skipped and tallied in `diag`.
pub fn filter_and_normalize(
    sentence: &ParsedSentence,
    config: &IngestConfig,
    diag: &mut IngestDiagnostics,
) -> Vec<DependencyRecord> {
    let mut out = Vec::with_capacity(sentence.arcs.len());
    for arc in &sentence.arcs {
        let head = &sentence.tokens[arc.head];
        let dep = &sentence.tokens[arc.dependent];
        if config.function_word_pos.contains(&head.upos) || config.function_word_pos.contains(&dep.upos) {
            diag.function_word_arcs += 1;
            continue;
        }
        match (config.normalize(head), config.normalize(dep)) {
            (Some(head), Some(dependent)) => out.push(DependencyRecord {
                head,
                dependent,
                relation: sentence.relation(arc).to_string(),
                sentence: sentence.sentence.id.clone(),
            }),
            _ => diag.missing_lemma += 1,
        }
    }
    out
}

/// Multiset of dependency records, kept in ingestion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyTable {
    records: Vec<DependencyRecord>,
}

impl DependencyTable {
    pub fn new(records: Vec<DependencyRecord>) -> Self {
        DependencyTable { records }
    }

    pub fn records(&self) -> &[DependencyRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn extend(&mut self, other: DependencyTable) {
        self.records.extend(other.records);
    }

    /// Count of records per directed (head, dependent) pair.
    pub fn pair_frequencies(&self) -> BTreeMap<(LexicalUnit, LexicalUnit), u64> {
        let mut freq = BTreeMap::new();
        for r in &self.records {
            *freq.entry((r.head.clone(), r.dependent.clone())).or_insert(0) += 1;
        }
        freq
    }

    pub fn units(&self) -> BTreeSet<LexicalUnit> {
        self.records.iter().flat_map(|r| [r.head.clone(), r.dependent.clone()]).collect()
    }

    pub fn to_jsonl(&self) -> Result<Vec<u8>> {
        format::to_jsonl(&self.records)
    }

    pub fn from_jsonl(bytes: &[u8]) -> Result<Self> {
        Ok(DependencyTable { records: format::from_jsonl(bytes)? })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct SentenceRow {
    id: SentenceId,
    text: String,
}

/// Sentence id to original text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentenceStore {
    pub language: String,
    pub sentences: BTreeMap<SentenceId, String>,
}

impl SentenceStore {
    pub fn new(language: impl Into<String>) -> Self {
        SentenceStore { language: language.into(), sentences: BTreeMap::new() }
    }

    pub fn get(&self, id: &SentenceId) -> Option<&str> {
        self.sentences.get(id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn insert(&mut self, sentence: Sentence) {
        self.sentences.insert(sentence.id, sentence.text);
    }

    pub fn to_jsonl(&self) -> Result<Vec<u8>> {
        let rows: Vec<SentenceRow> =
            self.sentences.iter().map(|(id, text)| SentenceRow { id: id.clone(), text: text.clone() }).collect();
        format::to_jsonl(&rows)
    }

    pub fn from_jsonl(language: &str, bytes: &[u8]) -> Result<Self> {
        let rows: Vec<SentenceRow> = format::from_jsonl(bytes)?;
        let mut store = SentenceStore::new(language);
        for row in rows {
            if row.text.is_empty() {
                return Err(Error::Integrity(format!("sentence {} has empty text", row.id)));
            }
            if store.sentences.insert(row.id.clone(), row.text).is_some() {
                return Err(Error::Integrity(format!("duplicate sentence id {}", row.id)));
            }
        }
        Ok(store)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconStats {
    pub language: String,
    pub sentences: usize,
    pub distinct_units: usize,
    pub total_dependencies: usize,
    pub units_by_pos: BTreeMap<String, usize>,
    pub diagnostics: IngestDiagnostics,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestOutput {
    pub table: DependencyTable,
    pub sentences: SentenceStore,
    pub stats: LexiconStats,
}

/// A named document to ingest. The name becomes the sentence-id prefix.
#[derive(Debug, Clone)]
pub struct Source {
    pub doc: String,
    pub text: String,
}

impl Source {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::in_file(path, e.into()))?;
        let doc =
            path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string());
        Ok(Source { doc, text })
    }
}

struct DocResult {
    records: Vec<DependencyRecord>,
    sentences: Vec<Sentence>,
    diagnostics: IngestDiagnostics,
}

fn ingest_one(source: &Source, lang: &str, config: &IngestConfig) -> Result<DocResult> {
    let parsed = parse_corpus(&source.text, &source.doc, lang)?;
    let mut diagnostics = IngestDiagnostics { parse: parsed.diagnostics, ..Default::default() };
    let mut records = Vec::new();
    let mut sentences = Vec::with_capacity(parsed.sentences.len());
    for ps in parsed.sentences {
        records.extend(filter_and_normalize(&ps, config, &mut diagnostics));
        sentences.push(ps.sentence);
    }
    Ok(DocResult { records, sentences, diagnostics })
}

/// Ingests in-memory documents of one language. Documents are processed in
/// parallel and merged in input order.
pub fn ingest_sources(sources: &[Source], lang: &str, config: &IngestConfig) -> Result<IngestOutput> {
    let mut seen = BTreeSet::new();
    for s in sources {
        if !seen.insert(s.doc.as_str()) {
            return Err(Error::DuplicateDocument(s.doc.clone()));
        }
    }

    let results: Vec<Result<DocResult>> =
        sources.par_iter().map(|s| ingest_one(s, lang, config).map_err(|e| Error::in_file(&s.doc, e))).collect();

    let mut table = DependencyTable::default();
    let mut store = SentenceStore::new(lang);
    let mut diagnostics = IngestDiagnostics::default();
    for r in results {
        let r = r?;
        table.records.extend(r.records);
        for s in r.sentences {
            store.insert(s);
        }
        diagnostics.merge(&r.diagnostics);
    }

    let units = table.units();
    let mut units_by_pos = BTreeMap::new();
    for u in &units {
        *units_by_pos.entry(u.pos.to_string()).or_insert(0) += 1;
    }
    let stats = LexiconStats {
        language: lang.to_string(),
        sentences: store.len(),
        distinct_units: units.len(),
        total_dependencies: table.len(),
        units_by_pos,
        diagnostics,
    };
    Ok(IngestOutput { table, sentences: store, stats })
}

/// Ingests CoNLL-U files. Document ids are the file stems, which must be
/// distinct.
pub fn ingest(files: &[PathBuf], lang: &str, config: &IngestConfig) -> Result<IngestOutput> {
    let sources = files.iter().map(|p| Source::read(p)).collect::<Result<Vec<_>>>()?;
    ingest_sources(&sources, lang, config).map_err(|e| match e {
        Error::InFile { path, source } => {
            let full = files
                .iter()
                .find(|f| f.file_stem().map(|s| s == path.as_os_str()).unwrap_or(false))
                .cloned()
                .unwrap_or(path);
            Error::InFile { path: full, source }
        }
        other => other,
    })
}

pub const INGEST_KIND: &str = "lexatlas-ingest";
const DEPENDENCIES: &str = "dependencies.jsonl";
const SENTENCES: &str = "sentences.jsonl";
const STATS: &str = "lexicon_stats.json";

pub fn save_ingest(out: &IngestOutput, dir: &Path) -> Result<()> {
    let counts = BTreeMap::from([
        ("dependencies".to_string(), out.table.len() as u64),
        ("sentences".to_string(), out.sentences.len() as u64),
        ("units".to_string(), out.stats.distinct_units as u64),
    ]);
    format::write_bundle(
        dir,
        INGEST_KIND,
        &out.stats.language,
        counts,
        &[
            (DEPENDENCIES, out.table.to_jsonl()?),
            (SENTENCES, out.sentences.to_jsonl()?),
            (STATS, format::to_json_pretty(&out.stats)?),
        ],
    )
}

pub fn load_ingest(dir: &Path) -> Result<IngestOutput> {
    let (manifest, mut files) = format::read_bundle(dir, INGEST_KIND)?;
    let table = DependencyTable::from_jsonl(&format::take_file(&mut files, DEPENDENCIES)?)?;
    let sentences = SentenceStore::from_jsonl(&manifest.language, &format::take_file(&mut files, SENTENCES)?)?;
    let stats: LexiconStats = serde_json::from_slice(&format::take_file(&mut files, STATS)?)?;
    for r in table.records() {
        if sentences.get(&r.sentence).is_none() {
            return Err(Error::Integrity(format!("dependency references unknown sentence {}", r.sentence)));
        }
    }
    Ok(IngestOutput { table, sentences, stats })
}
