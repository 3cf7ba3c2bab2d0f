mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::ingest_fixtures;
use lexatlas::clique::maximal_cliques;
use lexatlas::graph::RelationKind;
use lexatlas::{
    build_context_graph, enumerate_cliques, primary_neighbors, secondary_neighbors, sense_cliques, CliquePolicy,
    DependencyRecord, DependencyTable, GraphConfig, LexicalUnit, Pos, SentenceId, TableIndex,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit(k: &str, pos: Pos) -> LexicalUnit {
    LexicalUnit::new(k, pos)
}

#[test]
fn arc_de_cercle_is_secondary() {
    let out = ingest_fixtures(&["decrire_arc.conllu"], "fr");
    let ix = TableIndex::new(&out.table);
    let cfg = GraphConfig::default();
    let decrire = unit("décrire", Pos::Verb);
    let primary: Vec<_> = primary_neighbors(&decrire, &ix, &cfg).into_iter().map(|n| n.unit).collect();
    assert_eq!(primary, [unit("arc", Pos::Noun)]);
    let secondary = secondary_neighbors(&decrire, &ix, &cfg);
    assert_eq!(secondary.len(), 1);
    assert_eq!(secondary[0].unit, unit("cercle", Pos::Noun));
    assert_eq!(secondary[0].via, BTreeSet::from([unit("arc", Pos::Noun)]));
}

#[test]
fn double_interruption_is_not_secondary() {
    let out = ingest_fixtures(&["decrire_chain.conllu"], "fr");
    let ix = TableIndex::new(&out.table);
    let secondary = secondary_neighbors(&unit("décrire", Pos::Verb), &ix, &GraphConfig::default());
    let units: Vec<_> = secondary.iter().map(|s| s.unit.key.as_str()).collect();
    assert_eq!(units, ["arc"]);
}

/// Independent construction: scans the raw record list for every query.
struct Reference<'a> {
    records: &'a [DependencyRecord],
    min: u64,
    include_secondary: bool,
}

type Support = BTreeSet<SentenceId>;
type VertexMap = BTreeMap<LexicalUnit, (RelationKind, Support)>;
type EdgeMap = BTreeMap<(LexicalUnit, LexicalUnit), (RelationKind, Support)>;
type PairSet = BTreeSet<(LexicalUnit, LexicalUnit)>;

impl Reference<'_> {
    fn links(&self, a: &LexicalUnit, b: &LexicalUnit) -> impl Iterator<Item = &DependencyRecord> {
        let (a, b) = (a.clone(), b.clone());
        self.records
            .iter()
            .filter(move |r| a != b && ((r.head == a && r.dependent == b) || (r.head == b && r.dependent == a)))
    }

    fn count(&self, a: &LexicalUnit, b: &LexicalUnit) -> u64 {
        self.links(a, b).count() as u64
    }

    fn sentences(&self, a: &LexicalUnit, b: &LexicalUnit) -> Support {
        self.links(a, b).map(|r| r.sentence.clone()).collect()
    }

    fn all_units(&self) -> BTreeSet<LexicalUnit> {
        self.records.iter().flat_map(|r| [r.head.clone(), r.dependent.clone()]).collect()
    }

    /// Sentences in which u-m and m-v are both attested, given the global
    /// thresholds on both hops.
    fn two_hop(&self, u: &LexicalUnit, m: &LexicalUnit, v: &LexicalUnit) -> Support {
        if u == v || m == u || m == v || self.count(u, m) < self.min || self.count(m, v) < self.min {
            return Support::new();
        }
        self.sentences(u, m).intersection(&self.sentences(m, v)).cloned().collect()
    }

    fn graph(&self, target: &LexicalUnit) -> (VertexMap, EdgeMap) {
        let units = self.all_units();
        let primary: BTreeSet<LexicalUnit> =
            units.iter().filter(|u| self.count(target, u) >= self.min).cloned().collect();
        let mut vertices = BTreeMap::new();
        for u in &primary {
            vertices.insert(u.clone(), (RelationKind::Primary, self.sentences(target, u)));
        }
        if self.include_secondary {
            for v in &units {
                if v == target || primary.contains(v) {
                    continue;
                }
                let support: Support = primary.iter().flat_map(|m| self.two_hop(target, m, v)).collect();
                if !support.is_empty() {
                    vertices.insert(v.clone(), (RelationKind::Secondary, support));
                }
            }
        }
        let mut edges = BTreeMap::new();
        let vs: Vec<&LexicalUnit> = vertices.keys().collect();
        for (i, a) in vs.iter().enumerate() {
            for b in &vs[i + 1..] {
                if self.count(a, b) >= self.min {
                    edges.insert(((*a).clone(), (*b).clone()), (RelationKind::Primary, self.sentences(a, b)));
                } else if self.include_secondary {
                    let support: Support = units.iter().flat_map(|m| self.two_hop(a, m, b)).collect();
                    if !support.is_empty() {
                        edges.insert(((*a).clone(), (*b).clone()), (RelationKind::Secondary, support));
                    }
                }
            }
        }
        (vertices, edges)
    }
}

fn random_records(rng: &mut ChaCha8Rng, n_units: usize, n_sentences: u32, n_records: usize) -> Vec<DependencyRecord> {
    (0..n_records)
        .map(|_| DependencyRecord {
            head: unit(&format!("u{}", rng.random_range(0..n_units)), Pos::Noun),
            dependent: unit(&format!("u{}", rng.random_range(0..n_units)), Pos::Noun),
            relation: "dep".into(),
            sentence: SentenceId::new("r", rng.random_range(1..=n_sentences)),
        })
        .collect()
}

#[test]
fn context_graph_matches_reference_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..300 {
        let records = random_records(&mut rng, 3 + trial % 6, 1 + (trial % 5) as u32, 4 + trial % 20);
        let table = DependencyTable::new(records.clone());
        let ix = TableIndex::new(&table);
        let min = 1 + (trial % 3) as u64;
        let include_secondary = trial % 4 != 0;
        let cfg = GraphConfig { min_pair_frequency: min, include_secondary, ..Default::default() };
        let reference = Reference { records: &records, min, include_secondary };
        for target in ix.units() {
            let graph = build_context_graph(&target, &ix, &cfg).unwrap();
            let (vertices, edges) = reference.graph(&target);
            let got_v: BTreeMap<_, _> =
                graph.vertices.iter().map(|v| (v.unit.clone(), (v.relation, v.support.clone()))).collect();
            assert_eq!(got_v, vertices, "trial {trial} target {target}");
            let got_e: BTreeMap<_, _> = graph
                .edges
                .iter()
                .map(|(&(a, b), e)| {
                    ((graph.vertices[a].unit.clone(), graph.vertices[b].unit.clone()), (e.kind, e.support.clone()))
                })
                .collect();
            assert_eq!(got_e, edges, "trial {trial} target {target}");
        }
    }
}

/// Every maximal clique, found by checking all vertex subsets.
fn brute_force_cliques(n: usize, adj: &[Vec<bool>]) -> BTreeSet<Vec<usize>> {
    let is_clique =
        |mask: u32| (0..n).all(|i| mask & (1 << i) == 0 || (0..n).all(|j| j == i || mask & (1 << j) == 0 || adj[i][j]));
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        if !is_clique(mask) {
            continue;
        }
        let extendable = (0..n).any(|v| mask & (1 << v) == 0 && is_clique(mask | (1 << v)));
        if !extendable {
            out.insert((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

#[test]
#[allow(clippy::needless_range_loop)]
fn bron_kerbosch_matches_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..400 {
        let n = rng.random_range(0..=12);
        let density: f64 = rng.random_range(0.0..1.0);
        let mut adj = vec![vec![false; n]; n];
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(density) {
                    adj[i][j] = true;
                    adj[j][i] = true;
                    edges.push((i, j));
                }
            }
        }
        let got: BTreeSet<Vec<usize>> = maximal_cliques(n, &edges, usize::MAX).unwrap().into_iter().collect();
        assert_eq!(got, brute_force_cliques(n, &adj));
    }
}

fn table_strategy() -> impl Strategy<Value = Vec<DependencyRecord>> {
    prop::collection::vec((0usize..7, 0usize..7, 1u32..5), 1..30).prop_map(|rows| {
        rows.into_iter()
            .map(|(h, d, s)| DependencyRecord {
                head: unit(&format!("u{h}"), Pos::Noun),
                dependent: unit(&format!("u{d}"), Pos::Noun),
                relation: "dep".into(),
                sentence: SentenceId::new("p", s),
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn cliques_are_maximal_and_cover_edges(records in table_strategy(), secondary in any::<bool>()) {
        let ix = TableIndex::new(&DependencyTable::new(records));
        let cfg = GraphConfig { include_secondary: secondary, ..Default::default() };
        for target in ix.units() {
            let g = build_context_graph(&target, &ix, &cfg).unwrap();
            for policy in [CliquePolicy::PrimaryOnly, CliquePolicy::PrimaryAndSecondary] {
                let admitted_vertex = |i: usize| policy == CliquePolicy::PrimaryAndSecondary
                    || g.vertices[i].relation == RelationKind::Primary;
                let adjacent = |a: usize, b: usize| g.edge(a, b).map(|e| {
                    policy == CliquePolicy::PrimaryAndSecondary || e.kind == RelationKind::Primary
                }).unwrap_or(false);
                let cliques = enumerate_cliques(&g, policy, usize::MAX).unwrap();
                let sets: Vec<Vec<usize>> = cliques.iter()
                    .map(|c| c.members.iter().map(|m| g.vertex_index(m).unwrap()).collect())
                    .collect();
                for (c, set) in cliques.iter().zip(&sets) {
                    prop_assert!(!set.is_empty());
                    prop_assert!(c.members.windows(2).all(|w| w[0] < w[1]));
                    for (k, &a) in set.iter().enumerate() {
                        prop_assert!(admitted_vertex(a));
                        for &b in &set[k + 1..] {
                            prop_assert!(adjacent(a, b));
                        }
                    }
                    for v in (0..g.vertices.len()).filter(|&v| admitted_vertex(v) && !set.contains(&v)) {
                        prop_assert!(set.iter().any(|&m| !adjacent(m, v)), "clique can be extended");
                    }
                }
                for &(a, b) in g.edges.keys() {
                    if admitted_vertex(a) && admitted_vertex(b) && adjacent(a, b) {
                        prop_assert!(sets.iter().any(|s| s.contains(&a) && s.contains(&b)), "edge not covered");
                    }
                }
            }
            let all = sense_cliques(&g, &cfg).unwrap();
            let distinct: BTreeSet<_> = all.iter().map(|c| c.members.clone()).collect();
            prop_assert_eq!(distinct.len(), all.len());
        }
    }

    #[test]
    fn raising_min_frequency_never_adds(records in table_strategy(), secondary in any::<bool>()) {
        let ix = TableIndex::new(&DependencyTable::new(records));
        for target in ix.units() {
            let mut previous: Option<(BTreeSet<LexicalUnit>, PairSet)> = None;
            for min in 1..=4 {
                let cfg = GraphConfig { min_pair_frequency: min, include_secondary: secondary, ..Default::default() };
                let g = build_context_graph(&target, &ix, &cfg).unwrap();
                let vs: BTreeSet<_> = g.vertices.iter().map(|v| v.unit.clone()).collect();
                let es: BTreeSet<_> = g.edges.keys()
                    .map(|&(a, b)| (g.vertices[a].unit.clone(), g.vertices[b].unit.clone()))
                    .collect();
                if let Some((pv, pe)) = &previous {
                    prop_assert!(vs.is_subset(pv));
                    prop_assert!(es.is_subset(pe));
                }
                previous = Some((vs, es));
            }
        }
    }

    #[test]
    fn primary_and_secondary_disjoint(records in table_strategy(), min in 1u64..3) {
        let ix = TableIndex::new(&DependencyTable::new(records));
        let cfg = GraphConfig { min_pair_frequency: min, ..Default::default() };
        for target in ix.units() {
            let p: BTreeSet<_> = primary_neighbors(&target, &ix, &cfg).into_iter().map(|n| n.unit).collect();
            for s in secondary_neighbors(&target, &ix, &cfg) {
                prop_assert!(!p.contains(&s.unit));
                prop_assert!(s.unit != target);
                prop_assert!(!s.support.is_empty());
            }
        }
    }
}
