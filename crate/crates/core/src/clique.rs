//! Maximal clique enumeration over context graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{ContextGraph, GraphConfig, RelationKind};
use crate::unit::{LexicalUnit, SentenceId};

pub type CliqueKind = RelationKind;

/// Stable clique identifier: a hash of target, kind and sorted members.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CliqueId(pub String);

impl CliqueId {
    pub fn compute(target: &LexicalUnit, kind: CliqueKind, members: &[LexicalUnit]) -> Self {
        let mut h = Sha256::new();
        h.update(target.to_string().as_bytes());
        h.update(b"\n");
        h.update(kind.as_str().as_bytes());
        for m in members {
            h.update(b"\n");
            h.update(m.to_string().as_bytes());
        }
        CliqueId(hex::encode(&h.finalize()[..8]))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CliqueId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A maximal set of pairwise related context units around a target.
/// The target itself is implicit and never listed among the members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clique {
    pub id: CliqueId,
    pub target: LexicalUnit,
    pub members: Vec<LexicalUnit>,
    pub kind: CliqueKind,
    pub support: BTreeSet<SentenceId>,
}

impl Clique {
    pub fn new(
        target: LexicalUnit,
        mut members: Vec<LexicalUnit>,
        kind: CliqueKind,
        support: BTreeSet<SentenceId>,
    ) -> Self {
        members.sort();
        members.dedup();
        let id = CliqueId::compute(&target, kind, &members);
        Clique { id, target, members, kind, support }
    }

    pub fn contains(&self, unit: &LexicalUnit) -> bool {
        self.members.binary_search(unit).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliquePolicy {
    /// Primary neighbors joined by primary edges.
    PrimaryOnly,
    /// Every vertex and every edge.
    PrimaryAndSecondary,
}

/// Fixed-size bit set over vertex indexes.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn or(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn count_and(&self, other: &Bits) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones()).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + tz)
            })
        })
    }
}

/// All maximal cliques of an undirected graph on `n` vertices, using
/// Bron–Kerbosch with Tomita pivoting. Each clique is sorted ascending and
/// the list is sorted lexicographically. Isolated vertices are singleton
/// cliques.
///
/// Fails with [`Error::CliqueBudgetExceeded`] once more than `budget`
/// cliques have been found.
pub fn maximal_cliques(n: usize, edges: &[(usize, usize)], budget: usize) -> Result<Vec<Vec<usize>>> {
    let mut adj = vec![Bits::new(n); n];
    for &(a, b) in edges {
        if a != b && a < n && b < n {
            adj[a].set(b);
            adj[b].set(a);
        }
    }
    let mut all = Bits::new(n);
    for i in 0..n {
        all.set(i);
    }
    let mut out = Vec::new();
    let mut r = Vec::new();
    expand(&adj, &mut r, all, Bits::new(n), &mut out, budget)?;
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    Ok(out)
}

fn expand(
    adj: &[Bits],
    r: &mut Vec<usize>,
    mut p: Bits,
    mut x: Bits,
    out: &mut Vec<Vec<usize>>,
    budget: usize,
) -> Result<()> {
    if p.is_empty() {
        if x.is_empty() && !r.is_empty() {
            if out.len() >= budget {
                return Err(Error::CliqueBudgetExceeded { found: out.len() });
            }
            out.push(r.clone());
        }
        return Ok(());
    }
    let pivot = p.or(&x).iter().max_by_key(|&u| (p.count_and(&adj[u]), std::cmp::Reverse(u))).expect("P is non-empty");
    let candidates: Vec<usize> = p.and_not(&adj[pivot]).iter().collect();
    for v in candidates {
        r.push(v);
        expand(adj, r, p.and(&adj[v]), x.and(&adj[v]), out, budget)?;
        r.pop();
        p.clear(v);
        x.set(v);
    }
    Ok(())
}

/// Maximal cliques of `graph` under `policy`, in canonical order.
///
/// Under [`CliquePolicy::PrimaryAndSecondary`] a clique is tagged primary
/// only if all its members are primary neighbors and all its internal
/// edges are primary.
pub fn enumerate_cliques(graph: &ContextGraph, policy: CliquePolicy, budget: usize) -> Result<Vec<Clique>> {
    let admitted: Vec<usize> = (0..graph.vertices.len())
        .filter(|&i| policy == CliquePolicy::PrimaryAndSecondary || graph.vertices[i].relation == RelationKind::Primary)
        .collect();
    let local: BTreeMap<usize, usize> = admitted.iter().enumerate().map(|(l, &g)| (g, l)).collect();
    let edges: Vec<(usize, usize)> = graph
        .edges
        .iter()
        .filter(|(_, e)| policy == CliquePolicy::PrimaryAndSecondary || e.kind == RelationKind::Primary)
        .filter_map(|(&(a, b), _)| Some((*local.get(&a)?, *local.get(&b)?)))
        .collect();

    let found = maximal_cliques(admitted.len(), &edges, budget)?;
    let mut cliques: Vec<Clique> = found
        .into_iter()
        .map(|c| {
            let members: Vec<usize> = c.into_iter().map(|l| admitted[l]).collect();
            let all_primary = members.iter().all(|&i| graph.vertices[i].relation == RelationKind::Primary)
                && members.iter().enumerate().all(|(k, &a)| {
                    members[k + 1..]
                        .iter()
                        .all(|&b| graph.edge(a, b).map(|e| e.kind == RelationKind::Primary).unwrap_or(false))
                });
            let kind = if all_primary { RelationKind::Primary } else { RelationKind::Secondary };
            let support = members.iter().flat_map(|&i| graph.vertices[i].support.iter().cloned()).collect();
            Clique::new(
                graph.target.clone(),
                members.iter().map(|&i| graph.vertices[i].unit.clone()).collect(),
                kind,
                support,
            )
        })
        .collect();
    cliques.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(cliques)
}

/// The sense cliques of a target: the primary-only enumeration, plus the
/// mixed enumeration when secondary relations are enabled. A member set
/// found by both keeps a single clique tagged primary.
pub fn sense_cliques(graph: &ContextGraph, cfg: &GraphConfig) -> Result<Vec<Clique>> {
    let mut by_members: BTreeMap<Vec<LexicalUnit>, Clique> = BTreeMap::new();
    for c in enumerate_cliques(graph, CliquePolicy::PrimaryOnly, cfg.max_cliques)? {
        by_members.insert(c.members.clone(), c);
    }
    if cfg.include_secondary {
        for c in enumerate_cliques(graph, CliquePolicy::PrimaryAndSecondary, cfg.max_cliques)? {
            match by_members.get(&c.members) {
                Some(existing) if existing.kind == RelationKind::Primary => {}
                _ => {
                    by_members.insert(c.members.clone(), c);
                }
            }
        }
    }
    if by_members.len() > cfg.max_cliques {
        return Err(Error::CliqueBudgetExceeded { found: by_members.len() });
    }
    Ok(by_members.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ContextEdge, ContextVertex};
    use crate::unit::Pos;

    fn graph(names: &[&str], edges: &[(usize, usize, RelationKind)], secondary: &[usize]) -> ContextGraph {
        let vertices = names
            .iter()
            .enumerate()
            .map(|(i, k)| ContextVertex {
                unit: LexicalUnit::new(*k, Pos::Noun),
                relation: if secondary.contains(&i) { RelationKind::Secondary } else { RelationKind::Primary },
                frequency: 1,
                support: BTreeSet::from([SentenceId::new("s", i as u32 + 1)]),
            })
            .collect();
        let edges = edges
            .iter()
            .map(|&(a, b, kind)| ((a.min(b), a.max(b)), ContextEdge { kind, support: BTreeSet::new() }))
            .collect();
        ContextGraph { target: LexicalUnit::new("t", Pos::Noun), vertices, edges, truncated: 0 }
    }

    fn keys(cs: &[Clique]) -> Vec<Vec<&str>> {
        cs.iter().map(|c| c.members.iter().map(|m| m.key.as_str()).collect()).collect()
    }

    use RelationKind::{Primary as P, Secondary as S};

    #[test]
    fn triangle_and_path() {
        let g = graph(&["a", "b", "c"], &[(0, 1, P), (1, 2, P), (0, 2, P)], &[]);
        let cs = enumerate_cliques(&g, CliquePolicy::PrimaryOnly, 100).unwrap();
        assert_eq!(keys(&cs), [["a", "b", "c"]]);
        assert_eq!(cs[0].support.len(), 3);

        let g = graph(&["a", "b", "c"], &[(0, 1, P), (1, 2, P)], &[]);
        let cs = enumerate_cliques(&g, CliquePolicy::PrimaryOnly, 100).unwrap();
        assert_eq!(keys(&cs), [vec!["a", "b"], vec!["b", "c"]]);
    }

    #[test]
    fn isolated_vertices_and_empty_graph() {
        let g = graph(&["a", "b"], &[], &[]);
        let cs = enumerate_cliques(&g, CliquePolicy::PrimaryOnly, 100).unwrap();
        assert_eq!(keys(&cs), [["a"], ["b"]]);
        let g = graph(&[], &[], &[]);
        assert!(enumerate_cliques(&g, CliquePolicy::PrimaryOnly, 100).unwrap().is_empty());
    }

    #[test]
    fn policies_and_kinds() {
        // a-b primary, b-c secondary edge, d is a secondary neighbor tied to c
        let g = graph(&["a", "b", "c", "d"], &[(0, 1, P), (1, 2, S), (2, 3, P)], &[3]);
        let primary = enumerate_cliques(&g, CliquePolicy::PrimaryOnly, 100).unwrap();
        assert_eq!(keys(&primary), [vec!["a", "b"], vec!["c"]]);
        assert!(primary.iter().all(|c| c.kind == P));

        let mixed = enumerate_cliques(&g, CliquePolicy::PrimaryAndSecondary, 100).unwrap();
        assert_eq!(keys(&mixed), [["a", "b"], ["b", "c"], ["c", "d"]]);
        assert_eq!(mixed.iter().map(|c| c.kind).collect::<Vec<_>>(), [P, S, S]);

        let all = sense_cliques(&g, &GraphConfig::default()).unwrap();
        assert_eq!(keys(&all), [vec!["a", "b"], vec!["b", "c"], vec!["c"], vec!["c", "d"]]);
        assert_eq!(all[0].kind, P);
    }

    #[test]
    fn budget_exceeded() {
        // 3 disjoint edges: 3 maximal cliques
        let err = maximal_cliques(6, &[(0, 1), (2, 3), (4, 5)], 2).unwrap_err();
        assert!(matches!(err, Error::CliqueBudgetExceeded { found: 2 }));
        assert_eq!(maximal_cliques(6, &[(0, 1), (2, 3), (4, 5)], 3).unwrap().len(), 3);
    }

    #[test]
    fn ids_are_stable_and_kind_sensitive() {
        let t = LexicalUnit::new("t", Pos::Noun);
        let m = vec![LexicalUnit::new("b", Pos::Noun), LexicalUnit::new("a", Pos::Noun)];
        let a = Clique::new(t.clone(), m.clone(), P, BTreeSet::new());
        let b = Clique::new(t.clone(), m.into_iter().rev().collect(), P, BTreeSet::new());
        assert_eq!(a.id, b.id);
        assert_eq!(a.id.as_str().len(), 16);
        let c = Clique::new(t, a.members.clone(), S, BTreeSet::new());
        assert_ne!(a.id, c.id);
    }

    #[test]
    fn wide_graph_crosses_word_boundary() {
        // 130 vertices in a path exercises multi-word bit sets
        let edges: Vec<_> = (0..129).map(|i| (i, i + 1)).collect();
        let cs = maximal_cliques(130, &edges, 1000).unwrap();
        assert_eq!(cs.len(), 129);
        assert_eq!(cs[128], vec![128, 129]);
    }
}
