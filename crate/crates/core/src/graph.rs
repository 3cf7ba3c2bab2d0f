//! Per-target context graphs over the dependency table.
//!
//! A unit `u` is a *primary* neighbor of the target when the table holds a
//! direct relation between them. It is a *secondary* neighbor when it is
//! not primary but reaches the target through exactly one intermediate
//! unit `m`, with both hops `(target, m)` and `(m, u)` attested in the same
//! sentence. Edges between context units follow the same rule: primary
//! when directly related, secondary when they share an intermediate inside
//! one sentence. Edge direction is ignored and self-relations never form
//! edges.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::DependencyTable;
use crate::unit::{LexicalUnit, SentenceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Primary,
    Secondary,
}

impl RelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::Primary => "primary",
            RelationKind::Secondary => "secondary",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub min_pair_frequency: u64,
    pub include_secondary: bool,
    /// Highest-frequency neighbors are kept when the graph is larger.
    pub max_vertices: usize,
    /// Enumeration stops with an error past this many cliques.
    pub max_cliques: usize,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig { min_pair_frequency: 1, include_secondary: true, max_vertices: 500, max_cliques: 100_000 }
    }
}

impl GraphConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_pair_frequency == 0 || self.max_vertices == 0 || self.max_cliques == 0 {
            return Err(Error::InvalidParameter(
                "min_pair_frequency, max_vertices and max_cliques must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Default)]
struct PairStat {
    count: u64,
    sentences: BTreeSet<u32>,
}

/// Interned, undirected view of a [`DependencyTable`] for graph building.
#[derive(Debug, Default)]
pub struct TableIndex {
    units: Vec<LexicalUnit>,
    ids: HashMap<LexicalUnit, u32>,
    sentence_ids: Vec<SentenceId>,
    pairs: HashMap<(u32, u32), PairStat>,
    adjacency: Vec<BTreeSet<u32>>,
    /// Distinct undirected pairs attested in each sentence.
    local_pairs: Vec<Vec<(u32, u32)>>,
    unit_sentences: Vec<BTreeSet<u32>>,
    unit_frequency: Vec<u64>,
}

fn ordered(a: u32, b: u32) -> (u32, u32) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl TableIndex {
    pub fn new(table: &DependencyTable) -> Self {
        let mut ix = TableIndex::default();
        let mut sentence_lookup: HashMap<SentenceId, u32> = HashMap::new();
        for r in table.records() {
            let h = ix.intern(&r.head);
            let d = ix.intern(&r.dependent);
            let s = *sentence_lookup.entry(r.sentence.clone()).or_insert_with(|| {
                ix.sentence_ids.push(r.sentence.clone());
                ix.local_pairs.push(Vec::new());
                (ix.sentence_ids.len() - 1) as u32
            });
            ix.unit_frequency[h as usize] += 1;
            ix.unit_sentences[h as usize].insert(s);
            if h == d {
                continue;
            }
            ix.unit_frequency[d as usize] += 1;
            ix.unit_sentences[d as usize].insert(s);
            let key = ordered(h, d);
            let stat = ix.pairs.entry(key).or_default();
            stat.count += 1;
            stat.sentences.insert(s);
            ix.adjacency[h as usize].insert(d);
            ix.adjacency[d as usize].insert(h);
            let local = &mut ix.local_pairs[s as usize];
            if !local.contains(&key) {
                local.push(key);
            }
        }
        ix
    }

    fn intern(&mut self, unit: &LexicalUnit) -> u32 {
        if let Some(&id) = self.ids.get(unit) {
            return id;
        }
        let id = self.units.len() as u32;
        self.units.push(unit.clone());
        self.ids.insert(unit.clone(), id);
        self.adjacency.push(BTreeSet::new());
        self.unit_sentences.push(BTreeSet::new());
        self.unit_frequency.push(0);
        id
    }

    pub fn contains(&self, unit: &LexicalUnit) -> bool {
        self.ids.contains_key(unit)
    }

    /// Every unit occurring in at least one record, in canonical order.
    pub fn units(&self) -> Vec<LexicalUnit> {
        let mut v = self.units.clone();
        v.sort();
        v
    }

    /// Number of records involving `unit`.
    pub fn frequency(&self, unit: &LexicalUnit) -> u64 {
        self.ids.get(unit).map(|&i| self.unit_frequency[i as usize]).unwrap_or(0)
    }

    /// Undirected record count between two units.
    pub fn pair_count(&self, a: &LexicalUnit, b: &LexicalUnit) -> u64 {
        match (self.ids.get(a), self.ids.get(b)) {
            (Some(&a), Some(&b)) if a != b => self.pairs.get(&ordered(a, b)).map(|p| p.count).unwrap_or(0),
            _ => 0,
        }
    }

    fn count(&self, a: u32, b: u32) -> u64 {
        if a == b {
            return 0;
        }
        self.pairs.get(&ordered(a, b)).map(|p| p.count).unwrap_or(0)
    }

    fn sentences_of(&self, set: &BTreeSet<u32>) -> BTreeSet<SentenceId> {
        set.iter().map(|&s| self.sentence_ids[s as usize].clone()).collect()
    }

    fn local_neighbors(&self, sentence: u32, unit: u32) -> impl Iterator<Item = u32> + '_ {
        self.local_pairs[sentence as usize].iter().filter_map(move |&(a, b)| {
            if a == unit {
                Some(b)
            } else if b == unit {
                Some(a)
            } else {
                None
            }
        })
    }

    fn primary_ids(&self, target: u32, cfg: &GraphConfig) -> BTreeMap<u32, u64> {
        self.adjacency[target as usize]
            .iter()
            .map(|&u| (u, self.count(target, u)))
            .filter(|&(_, c)| c >= cfg.min_pair_frequency)
            .collect()
    }

    /// Secondary neighbor id to (intermediates, supporting sentences).
    fn secondary_ids(
        &self,
        target: u32,
        primary: &BTreeMap<u32, u64>,
        cfg: &GraphConfig,
    ) -> BTreeMap<u32, (BTreeSet<u32>, BTreeSet<u32>)> {
        let mut out: BTreeMap<u32, (BTreeSet<u32>, BTreeSet<u32>)> = BTreeMap::new();
        if !cfg.include_secondary {
            return out;
        }
        for &m in primary.keys() {
            let hop = &self.pairs[&ordered(target, m)];
            for &s in &hop.sentences {
                for v in self.local_neighbors(s, m) {
                    if v == target || primary.contains_key(&v) || self.count(m, v) < cfg.min_pair_frequency {
                        continue;
                    }
                    let e = out.entry(v).or_default();
                    e.0.insert(m);
                    e.1.insert(s);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Neighbor {
    pub unit: LexicalUnit,
    /// Record count for primary neighbors, supporting-sentence count for
    /// secondary ones.
    pub frequency: u64,
    pub support: BTreeSet<SentenceId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecondaryNeighbor {
    pub unit: LexicalUnit,
    pub via: BTreeSet<LexicalUnit>,
    pub support: BTreeSet<SentenceId>,
}

/// Units directly related to `target` at least `min_pair_frequency` times.
/// Empty when the target is absent.
pub fn primary_neighbors(target: &LexicalUnit, index: &TableIndex, cfg: &GraphConfig) -> Vec<Neighbor> {
    let Some(&t) = index.ids.get(target) else {
        return Vec::new();
    };
    let mut out: Vec<Neighbor> = index
        .primary_ids(t, cfg)
        .into_iter()
        .map(|(u, count)| Neighbor {
            unit: index.units[u as usize].clone(),
            frequency: count,
            support: index.sentences_of(&index.pairs[&ordered(t, u)].sentences),
        })
        .collect();
    out.sort_by(|a, b| a.unit.cmp(&b.unit));
    out
}

/// Units reaching `target` through exactly one intermediate within a
/// sentence, excluding primary neighbors.
pub fn secondary_neighbors(target: &LexicalUnit, index: &TableIndex, cfg: &GraphConfig) -> Vec<SecondaryNeighbor> {
    let Some(&t) = index.ids.get(target) else {
        return Vec::new();
    };
    let primary = index.primary_ids(t, cfg);
    let mut out: Vec<SecondaryNeighbor> = index
        .secondary_ids(t, &primary, cfg)
        .into_iter()
        .map(|(v, (via, support))| SecondaryNeighbor {
            unit: index.units[v as usize].clone(),
            via: via.iter().map(|&m| index.units[m as usize].clone()).collect(),
            support: index.sentences_of(&support),
        })
        .collect();
    out.sort_by(|a, b| a.unit.cmp(&b.unit));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextVertex {
    pub unit: LexicalUnit,
    /// How the unit relates to the target.
    pub relation: RelationKind,
    pub frequency: u64,
    /// Support of the unit's relation to the target.
    pub support: BTreeSet<SentenceId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextEdge {
    pub kind: RelationKind,
    pub support: BTreeSet<SentenceId>,
}

/// Context units of one target and the relations among them.
///
/// Vertices are sorted by unit; edge keys are vertex index pairs `(i, j)`
/// with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextGraph {
    pub target: LexicalUnit,
    pub vertices: Vec<ContextVertex>,
    pub edges: BTreeMap<(usize, usize), ContextEdge>,
    /// Neighbors dropped by the `max_vertices` cap.
    pub truncated: usize,
}

impl ContextGraph {
    pub fn vertex_index(&self, unit: &LexicalUnit) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.unit.cmp(unit)).ok()
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<&ContextEdge> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges.get(&key)
    }
}

/// Builds the context graph of `target`.
pub fn build_context_graph(target: &LexicalUnit, index: &TableIndex, cfg: &GraphConfig) -> Result<ContextGraph> {
    cfg.validate()?;
    let &t = index.ids.get(target).ok_or_else(|| Error::UnknownUnit(target.to_string()))?;

    let primary = index.primary_ids(t, cfg);
    let secondary = index.secondary_ids(t, &primary, cfg);

    let mut candidates: Vec<(u32, RelationKind, u64, BTreeSet<u32>)> = primary
        .iter()
        .map(|(&u, &count)| (u, RelationKind::Primary, count, index.pairs[&ordered(t, u)].sentences.clone()))
        .chain(
            secondary.into_iter().map(|(v, (_, support))| (v, RelationKind::Secondary, support.len() as u64, support)),
        )
        .collect();
    candidates.sort_by(|a, b| {
        b.2.cmp(&a.2).then(a.1.cmp(&b.1)).then_with(|| index.units[a.0 as usize].cmp(&index.units[b.0 as usize]))
    });
    let truncated = candidates.len().saturating_sub(cfg.max_vertices);
    candidates.truncate(cfg.max_vertices);
    candidates.sort_by(|a, b| index.units[a.0 as usize].cmp(&index.units[b.0 as usize]));

    let position: HashMap<u32, usize> = candidates.iter().enumerate().map(|(i, c)| (c.0, i)).collect();
    let min = cfg.min_pair_frequency;
    let mut edges: BTreeMap<(usize, usize), ContextEdge> = BTreeMap::new();

    for (i, c) in candidates.iter().enumerate() {
        let u = c.0;
        for &w in &index.adjacency[u as usize] {
            if let Some(&j) = position.get(&w) {
                if i < j && index.count(u, w) >= min {
                    edges.insert(
                        (i, j),
                        ContextEdge {
                            kind: RelationKind::Primary,
                            support: index.sentences_of(&index.pairs[&ordered(u, w)].sentences),
                        },
                    );
                }
            }
        }
    }

    if cfg.include_secondary {
        let mut secondary_edges: BTreeMap<(usize, usize), BTreeSet<u32>> = BTreeMap::new();
        for (i, c) in candidates.iter().enumerate() {
            let u = c.0;
            for &s in &index.unit_sentences[u as usize] {
                for m in index.local_neighbors(s, u) {
                    if index.count(u, m) < min {
                        continue;
                    }
                    for v in index.local_neighbors(s, m) {
                        let Some(&j) = position.get(&v) else { continue };
                        if j <= i || edges.contains_key(&(i, j)) || index.count(m, v) < min {
                            continue;
                        }
                        secondary_edges.entry((i, j)).or_default().insert(s);
                    }
                }
            }
        }
        for (key, support) in secondary_edges {
            edges.insert(key, ContextEdge { kind: RelationKind::Secondary, support: index.sentences_of(&support) });
        }
    }

    let vertices = candidates
        .into_iter()
        .map(|(u, relation, frequency, support)| ContextVertex {
            unit: index.units[u as usize].clone(),
            relation,
            frequency,
            support: index.sentences_of(&support),
        })
        .collect();

    Ok(ContextGraph { target: target.clone(), vertices, edges, truncated })
}
