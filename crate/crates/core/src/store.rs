//! Per-language atlases and the queries that navigate them.
//!
//! An atlas holds, for every target unit, its sense cliques and semantic
//! map, together with two indexes: unit to the cliques containing it as a
//! member, and clique to the sentences that support it.
//!
//! On disk an atlas is a bundle (see [`crate::format`]) of five files:
//!
//! | file                  | one line per                                  |
//! |-----------------------|-----------------------------------------------|
//! | `entries.jsonl`       | target: `{target, cliques, map}`              |
//! | `sentences.jsonl`     | sentence: `{id, text}`                        |
//! | `unit_index.jsonl`    | member unit: `{unit, cliques}`                |
//! | `clique_index.jsonl`  | clique: `{clique, target, support}`           |
//! | `report.json`         | build report (single JSON document)           |

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ca::{build_incidence, correspondence_analysis, SemanticMap, DEFAULT_TOLERANCE};
use crate::clique::{sense_cliques, Clique, CliqueId};
use crate::error::{Error, Result};
use crate::format;
use crate::graph::{build_context_graph, GraphConfig, TableIndex};
use crate::ingest::{DependencyTable, SentenceStore};
use crate::unit::{LexicalUnit, SentenceId};

pub const ATLAS_KIND: &str = "lexatlas-atlas";
const ENTRIES: &str = "entries.jsonl";
const SENTENCES: &str = "sentences.jsonl";
const UNIT_INDEX: &str = "unit_index.jsonl";
const CLIQUE_INDEX: &str = "clique_index.jsonl";
const REPORT: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtlasConfig {
    pub graph: GraphConfig,
    pub ca_tolerance: f64,
    /// Skip targets involved in a single relation.
    pub skip_hapax: bool,
}

impl Default for AtlasConfig {
    fn default() -> Self {
        AtlasConfig { graph: GraphConfig::default(), ca_tolerance: DEFAULT_TOLERANCE, skip_hapax: false }
    }
}

impl AtlasConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub enum Targets {
    All,
    Units(Vec<LexicalUnit>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasEntry {
    pub cliques: Vec<Clique>,
    pub map: SemanticMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildFailure {
    pub target: LexicalUnit,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub targets_considered: usize,
    pub entries: usize,
    pub without_cliques: usize,
    pub skipped_hapax: usize,
    pub failures: Vec<BuildFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atlas {
    pub language: String,
    pub entries: BTreeMap<LexicalUnit, AtlasEntry>,
    pub sentences: SentenceStore,
    pub unit_index: BTreeMap<LexicalUnit, BTreeSet<CliqueId>>,
    pub clique_index: BTreeMap<CliqueId, BTreeSet<SentenceId>>,
    pub report: BuildReport,
    owners: BTreeMap<CliqueId, LexicalUnit>,
}

impl Atlas {
    pub fn clique_count(&self) -> usize {
        self.clique_index.len()
    }

    /// Target unit whose entry holds clique `id`.
    pub fn owner(&self, id: &CliqueId) -> Option<&LexicalUnit> {
        self.owners.get(id)
    }

    pub fn clique(&self, id: &CliqueId) -> Option<&Clique> {
        let entry = self.entries.get(self.owners.get(id)?)?;
        entry.cliques.iter().find(|c| &c.id == id)
    }

    /// Entry targets whose key equals `key`, over all parts of speech.
    pub fn units_with_key<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a LexicalUnit> + 'a {
        self.entries.keys().filter(move |u| u.key == key)
    }

    /// Resolves `key#POS` or a bare key. A bare key resolves to its first
    /// entry in unit order.
    pub fn resolve(&self, text: &str) -> Option<LexicalUnit> {
        if let Ok(unit) = text.parse::<LexicalUnit>() {
            if self.entries.contains_key(&unit) {
                return Some(unit);
            }
        }
        self.units_with_key(text).next().cloned()
    }

    fn from_entries(
        language: String,
        entries: BTreeMap<LexicalUnit, AtlasEntry>,
        sentences: SentenceStore,
        report: BuildReport,
    ) -> Self {
        let (unit_index, clique_index, owners) = derive_indexes(&entries);
        Atlas { language, entries, sentences, unit_index, clique_index, report, owners }
    }

    /// Checks referential integrity and that the indexes invert the entries
    /// exactly.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (target, entry) in &self.entries {
            if entry.cliques.is_empty() {
                return Err(Error::Integrity(format!("entry {target} has no cliques")));
            }
            for c in &entry.cliques {
                if &c.target != target {
                    return Err(Error::Integrity(format!("clique {} filed under {target}", c.id)));
                }
                if c.members.is_empty() || c.members.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Integrity(format!("clique {} members not canonical", c.id)));
                }
                if CliqueId::compute(&c.target, c.kind, &c.members) != c.id {
                    return Err(Error::Integrity(format!("clique {} id does not match content", c.id)));
                }
                if !seen.insert(c.id.clone()) {
                    return Err(Error::Integrity(format!("duplicate clique id {}", c.id)));
                }
                if c.support.is_empty() {
                    return Err(Error::Integrity(format!("clique {} has empty support", c.id)));
                }
                for s in &c.support {
                    if self.sentences.get(s).is_none() {
                        return Err(Error::Integrity(format!("clique {} cites unknown sentence {s}", c.id)));
                    }
                }
            }
            let map = &entry.map;
            let ids: Vec<&CliqueId> = entry.cliques.iter().map(|c| &c.id).collect();
            if &map.target != target || map.clique_ids.iter().collect::<Vec<_>>() != ids {
                return Err(Error::Integrity(format!("map of {target} does not match its cliques")));
            }
            let axes = map.inertias.len();
            if map.clique_coords.len() != ids.len()
                || map.context_coords.len() != map.contexts.len()
                || map.clique_coords.iter().chain(&map.context_coords).any(|c| c.len() != axes)
                || map.axes_2d.iter().any(|&a| a >= axes)
            {
                return Err(Error::Integrity(format!("map of {target} has inconsistent dimensions")));
            }
        }
        let (unit_index, clique_index, _) = derive_indexes(&self.entries);
        for (unit, ids) in &self.unit_index {
            for id in ids {
                if !clique_index.contains_key(id) {
                    return Err(Error::Integrity(format!("unit index entry {unit} cites unknown clique {id}")));
                }
            }
        }
        if unit_index != self.unit_index {
            return Err(Error::Integrity("unit index does not invert clique membership".into()));
        }
        if clique_index != self.clique_index {
            return Err(Error::Integrity("clique index does not match clique supports".into()));
        }
        Ok(())
    }
}

type Indexes = (
    BTreeMap<LexicalUnit, BTreeSet<CliqueId>>,
    BTreeMap<CliqueId, BTreeSet<SentenceId>>,
    BTreeMap<CliqueId, LexicalUnit>,
);

fn derive_indexes(entries: &BTreeMap<LexicalUnit, AtlasEntry>) -> Indexes {
    let mut units: BTreeMap<LexicalUnit, BTreeSet<CliqueId>> = BTreeMap::new();
    let mut cliques = BTreeMap::new();
    let mut owners = BTreeMap::new();
    for (target, entry) in entries {
        for c in &entry.cliques {
            for m in &c.members {
                units.entry(m.clone()).or_default().insert(c.id.clone());
            }
            cliques.insert(c.id.clone(), c.support.clone());
            owners.insert(c.id.clone(), target.clone());
        }
    }
    (units, cliques, owners)
}

/// Cliques and map of one target.
pub fn build_entry(target: &LexicalUnit, index: &TableIndex, cfg: &AtlasConfig) -> Result<Option<AtlasEntry>> {
    let graph = build_context_graph(target, index, &cfg.graph)?;
    let cliques = sense_cliques(&graph, &cfg.graph)?;
    if cliques.is_empty() {
        return Ok(None);
    }
    let map = correspondence_analysis(&build_incidence(&cliques)?, cfg.ca_tolerance)?;
    Ok(Some(AtlasEntry { cliques, map }))
}

/// Builds an atlas over the requested targets. Failures for individual
/// targets are recorded in the report and do not stop the build.
pub fn build_atlas(table: &DependencyTable, sentences: &SentenceStore, targets: &Targets, cfg: &AtlasConfig) -> Atlas {
    let index = TableIndex::new(table);
    let targets: Vec<LexicalUnit> = match targets {
        Targets::All => index.units(),
        Targets::Units(units) => {
            let mut v = units.clone();
            v.sort();
            v.dedup();
            v
        }
    };

    enum Outcome {
        Entry(AtlasEntry),
        Empty,
        Hapax,
        Failed(String),
    }

    let outcomes: Vec<(LexicalUnit, Outcome)> = targets
        .par_iter()
        .map(|t| {
            let outcome = if !index.contains(t) {
                Outcome::Failed(Error::UnknownUnit(t.to_string()).to_string())
            } else if cfg.skip_hapax && index.frequency(t) <= 1 {
                Outcome::Hapax
            } else {
                match build_entry(t, &index, cfg) {
                    Ok(Some(e)) => Outcome::Entry(e),
                    Ok(None) => Outcome::Empty,
                    Err(e) => Outcome::Failed(e.to_string()),
                }
            };
            (t.clone(), outcome)
        })
        .collect();

    let mut report = BuildReport { targets_considered: targets.len(), ..Default::default() };
    let mut entries = BTreeMap::new();
    let mut ids = BTreeSet::new();
    for (target, outcome) in outcomes {
        match outcome {
            Outcome::Entry(e) => {
                if let Some(dup) = e.cliques.iter().find(|c| ids.contains(&c.id)) {
                    report.failures.push(BuildFailure { target, error: format!("clique id collision on {}", dup.id) });
                    continue;
                }
                ids.extend(e.cliques.iter().map(|c| c.id.clone()));
                entries.insert(target, e);
            }
            Outcome::Empty => report.without_cliques += 1,
            Outcome::Hapax => report.skipped_hapax += 1,
            Outcome::Failed(error) => report.failures.push(BuildFailure { target, error }),
        }
    }
    report.entries = entries.len();
    Atlas::from_entries(sentences.language.clone(), entries, sentences.clone(), report)
}

/// A target's map and cliques.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WordView<'a> {
    pub target: &'a LexicalUnit,
    pub map: &'a SemanticMap,
    pub cliques: &'a [Clique],
}

/// `Ok(None)` for a unit without an entry.
pub fn query_word<'a>(atlas: &'a Atlas, unit: &LexicalUnit) -> Result<Option<WordView<'a>>> {
    let Some((target, entry)) = atlas.entries.get_key_value(unit) else {
        return Ok(None);
    };
    for c in &entry.cliques {
        if !atlas.clique_index.contains_key(&c.id) {
            return Err(Error::Integrity(format!("clique {} missing from the clique index", c.id)));
        }
    }
    Ok(Some(WordView { target, map: &entry.map, cliques: &entry.cliques }))
}

/// Supporting sentences of a clique, in sentence-id order.
pub fn sentences_for_clique(atlas: &Atlas, id: &CliqueId) -> Result<Vec<(SentenceId, String)>> {
    let support = atlas.clique_index.get(id).ok_or_else(|| Error::NotFound(format!("clique {id}")))?;
    support
        .iter()
        .map(|s| {
            atlas
                .sentences
                .get(s)
                .map(|t| (s.clone(), t.to_string()))
                .ok_or_else(|| Error::Integrity(format!("clique {id} cites unknown sentence {s}")))
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct EntryRow {
    target: LexicalUnit,
    cliques: Vec<Clique>,
    map: SemanticMap,
}

#[derive(Serialize, Deserialize)]
struct UnitIndexRow {
    unit: LexicalUnit,
    cliques: BTreeSet<CliqueId>,
}

#[derive(Serialize, Deserialize)]
struct CliqueIndexRow {
    clique: CliqueId,
    target: LexicalUnit,
    support: BTreeSet<SentenceId>,
}

pub fn save_atlas(atlas: &Atlas, dir: &Path) -> Result<()> {
    let entries: Vec<EntryRow> = atlas
        .entries
        .iter()
        .map(|(t, e)| EntryRow { target: t.clone(), cliques: e.cliques.clone(), map: e.map.clone() })
        .collect();
    let unit_rows: Vec<UnitIndexRow> =
        atlas.unit_index.iter().map(|(u, ids)| UnitIndexRow { unit: u.clone(), cliques: ids.clone() }).collect();
    let clique_rows: Vec<CliqueIndexRow> = atlas
        .clique_index
        .iter()
        .map(|(id, support)| CliqueIndexRow {
            clique: id.clone(),
            target: atlas.owners.get(id).cloned().unwrap_or_else(|| LexicalUnit::new("?", crate::unit::Pos::X)),
            support: support.clone(),
        })
        .collect();
    let counts = BTreeMap::from([
        ("entries".to_string(), atlas.entries.len() as u64),
        ("cliques".to_string(), atlas.clique_index.len() as u64),
        ("sentences".to_string(), atlas.sentences.len() as u64),
    ]);
    format::write_bundle(
        dir,
        ATLAS_KIND,
        &atlas.language,
        counts,
        &[
            (ENTRIES, format::to_jsonl(&entries)?),
            (SENTENCES, atlas.sentences.to_jsonl()?),
            (UNIT_INDEX, format::to_jsonl(&unit_rows)?),
            (CLIQUE_INDEX, format::to_jsonl(&clique_rows)?),
            (REPORT, format::to_json_pretty(&atlas.report)?),
        ],
    )
}

pub fn load_atlas(dir: &Path) -> Result<Atlas> {
    let (manifest, mut files) = format::read_bundle(dir, ATLAS_KIND)?;
    let rows: Vec<EntryRow> = format::from_jsonl(&format::take_file(&mut files, ENTRIES)?)?;
    let sentences = SentenceStore::from_jsonl(&manifest.language, &format::take_file(&mut files, SENTENCES)?)?;
    let unit_rows: Vec<UnitIndexRow> = format::from_jsonl(&format::take_file(&mut files, UNIT_INDEX)?)?;
    let clique_rows: Vec<CliqueIndexRow> = format::from_jsonl(&format::take_file(&mut files, CLIQUE_INDEX)?)?;
    let report: BuildReport = serde_json::from_slice(&format::take_file(&mut files, REPORT)?)?;

    let mut entries = BTreeMap::new();
    for row in rows {
        if entries.insert(row.target.clone(), AtlasEntry { cliques: row.cliques, map: row.map }).is_some() {
            return Err(Error::Integrity(format!("duplicate entry {}", row.target)));
        }
    }
    let mut atlas = Atlas::from_entries(manifest.language, entries, sentences, report);

    let mut stored_owners = BTreeMap::new();
    atlas.unit_index = unit_rows.into_iter().map(|r| (r.unit, r.cliques)).collect();
    atlas.clique_index = clique_rows
        .into_iter()
        .map(|r| {
            stored_owners.insert(r.clique.clone(), r.target);
            (r.clique, r.support)
        })
        .collect();
    if stored_owners != atlas.owners {
        return Err(Error::Integrity("clique index targets do not match entries".into()));
    }
    atlas.validate()?;
    Ok(atlas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::Sentence;
    use crate::ingest::DependencyRecord;
    use crate::unit::Pos;

    fn n(k: &str) -> LexicalUnit {
        LexicalUnit::new(k, Pos::Noun)
    }

    fn sample() -> (DependencyTable, SentenceStore) {
        let recs = [("t", "a", 1), ("t", "b", 1), ("a", "b", 2), ("t", "c", 3), ("u", "a", 4)];
        let table = DependencyTable::new(
            recs.iter()
                .map(|&(h, d, s)| DependencyRecord {
                    head: n(h),
                    dependent: n(d),
                    relation: "dep".into(),
                    sentence: SentenceId::new("d", s),
                })
                .collect(),
        );
        let mut store = SentenceStore::new("xx");
        for s in 1..=5 {
            store.insert(Sentence {
                id: SentenceId::new("d", s),
                text: format!("sentence {s}"),
                language: "xx".into(),
            });
        }
        (table, store)
    }

    #[test]
    fn empty_target_list() {
        let (table, store) = sample();
        let atlas = build_atlas(&table, &store, &Targets::Units(vec![]), &AtlasConfig::default());
        assert!(atlas.entries.is_empty());
        assert_eq!(atlas.sentences.len(), 5);
        atlas.validate().unwrap();
    }

    #[test]
    fn indexes_invert_membership() {
        let (table, store) = sample();
        let atlas = build_atlas(&table, &store, &Targets::All, &AtlasConfig::default());
        atlas.validate().unwrap();
        for (unit, ids) in &atlas.unit_index {
            for id in ids {
                assert!(atlas.clique(id).unwrap().contains(unit));
            }
        }
        let view = query_word(&atlas, &n("t")).unwrap().unwrap();
        assert!(view.cliques.iter().all(|c| c.target == n("t") && !c.support.is_empty()));
        assert!(query_word(&atlas, &n("nope")).unwrap().is_none());
        assert_eq!(atlas.resolve("t"), Some(n("t")));
        assert_eq!(atlas.resolve("t#NOUN"), Some(n("t")));
        assert_eq!(atlas.resolve("t#VERB"), None);
        assert_eq!(atlas.resolve("zz"), None);
    }

    #[test]
    fn unknown_targets_reported() {
        let (table, store) = sample();
        let atlas = build_atlas(&table, &store, &Targets::Units(vec![n("t"), n("missing")]), &AtlasConfig::default());
        assert_eq!(atlas.entries.len(), 1);
        assert_eq!(atlas.report.failures.len(), 1);
        assert!(atlas.report.failures[0].error.contains("unknown lexical unit"));
    }

    #[test]
    fn budget_failure_does_not_stop_build() {
        let (table, store) = sample();
        let mut cfg = AtlasConfig::default();
        cfg.graph.max_cliques = 1;
        let atlas = build_atlas(&table, &store, &Targets::All, &cfg);
        assert!(atlas.report.failures.iter().any(|f| f.error.contains("clique budget")));
        assert!(!atlas.entries.is_empty());
    }

    #[test]
    fn hapax_skipping() {
        let (table, store) = sample();
        let cfg = AtlasConfig { skip_hapax: true, ..Default::default() };
        let atlas = build_atlas(&table, &store, &Targets::All, &cfg);
        // c and u occur in one relation each
        assert_eq!(atlas.report.skipped_hapax, 2);
        assert!(!atlas.entries.contains_key(&n("u")));
    }

    #[test]
    fn sentence_lookup() {
        let (table, store) = sample();
        let atlas = build_atlas(&table, &store, &Targets::All, &AtlasConfig::default());
        let id = atlas.entries[&n("t")].cliques[0].id.clone();
        let sents = sentences_for_clique(&atlas, &id).unwrap();
        assert!(!sents.is_empty());
        assert!(matches!(sentences_for_clique(&atlas, &CliqueId("0".into())), Err(Error::NotFound(_))));
    }

    #[test]
    fn dangling_index_detected() {
        let (table, store) = sample();
        let mut atlas = build_atlas(&table, &store, &Targets::All, &AtlasConfig::default());
        let id = atlas.entries[&n("t")].cliques[0].id.clone();
        atlas.clique_index.remove(&id);
        assert!(matches!(query_word(&atlas, &n("t")), Err(Error::Integrity(_))));
        assert!(atlas.validate().is_err());
    }

    #[test]
    fn config_from_toml() {
        let cfg = AtlasConfig::from_toml("skip_hapax = true\n[graph]\nmin_pair_frequency = 2\n").unwrap();
        assert!(cfg.skip_hapax);
        assert_eq!(cfg.graph.min_pair_frequency, 2);
        assert!(cfg.graph.include_secondary);
    }
}
