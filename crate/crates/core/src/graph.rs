//! Directed probability graphs, node weights and seed sets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One directed edge with its activation probability and optional dependence group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<u64>,
}

impl Edge {
    pub fn new(tail: usize, head: usize, p: f64) -> Self {
        Edge { tail, head, p, group: None }
    }

    pub fn grouped(tail: usize, head: usize, p: f64, group: u64) -> Self {
        Edge { tail, head, p, group: Some(group) }
    }
}

/// Immutable directed graph over dense node ids `0..n` with CSR adjacency in
/// both directions. Edge ids are positions in [`Graph::edges`].
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    weights: Vec<f64>,
    unit_weights: bool,
    out_offsets: Vec<usize>,
    out_ids: Vec<usize>,
    in_offsets: Vec<usize>,
    in_ids: Vec<usize>,
}

fn csr(n: usize, edges: &[Edge], key: impl Fn(&Edge) -> usize) -> (Vec<usize>, Vec<usize>) {
    let mut offsets = vec![0usize; n + 1];
    for e in edges {
        offsets[key(e) + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut ids = vec![0usize; edges.len()];
    for (id, e) in edges.iter().enumerate() {
        let slot = &mut fill[key(e)];
        ids[*slot] = id;
        *slot += 1;
    }
    (offsets, ids)
}

impl Graph {
    /// Build a graph, checking endpoints, probabilities, weights and group consistency.
    pub fn new(n: usize, edges: Vec<Edge>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != n {
            return Err(Error::InvalidGraph(format!(
                "expected {n} node weights, got {}",
                weights.len()
            )));
        }
        if let Some((v, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidGraph(format!("node {v} has invalid weight {w}")));
        }
        let mut groups: BTreeMap<u64, (usize, f64)> = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= n || e.head >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} ({} -> {}) has an endpoint outside [0, {n})",
                    e.tail, e.head
                )));
            }
            if !(0.0..=1.0).contains(&e.p) {
                return Err(Error::InvalidGraph(format!("edge {i} has probability {} outside [0, 1]", e.p)));
            }
            if let Some(g) = e.group {
                match groups.get(&g) {
                    None => {
                        groups.insert(g, (e.tail, e.p));
                    }
                    Some(&(tail, p)) => {
                        if tail != e.tail {
                            return Err(Error::InvalidGraph(format!(
                                "group {g} mixes tail nodes {tail} and {}",
                                e.tail
                            )));
                        }
                        if p != e.p {
                            return Err(Error::InvalidGraph(format!(
                                "group {g} has disagreeing probabilities {p} and {}",
                                e.p
                            )));
                        }
                    }
                }
            }
        }
        let (out_offsets, out_ids) = csr(n, &edges, |e| e.tail);
        let (in_offsets, in_ids) = csr(n, &edges, |e| e.head);
        let unit_weights = weights.iter().all(|&w| w == 1.0);
        Ok(Graph { n, edges, weights, unit_weights, out_offsets, out_ids, in_offsets, in_ids })
    }

    pub fn with_unit_weights(n: usize, edges: Vec<Edge>) -> Result<Self> {
        Self::new(n, edges, vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.weights[v]
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn has_unit_weights(&self) -> bool {
        self.unit_weights
    }

    /// Ids of edges leaving `v`, in increasing id order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_ids[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    /// Ids of edges entering `v`, in increasing id order.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_ids[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    /// Same topology with the weights replaced.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.n, self.edges.clone(), weights)
    }
}

/// A sorted, duplicate-free set of node ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeedSet(Vec<usize>);

impl SeedSet {
    /// Validate ids against a node count, then sort and deduplicate.
    pub fn new(ids: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let mut v: Vec<usize> = ids.into_iter().collect();
        if let Some(&node) = v.iter().find(|&&x| x >= n) {
            return Err(Error::NodeOutOfRange { node, n });
        }
        v.sort_unstable();
        v.dedup();
        Ok(SeedSet(v))
    }

    pub fn empty() -> Self {
        SeedSet(Vec::new())
    }

    pub fn single(v: usize) -> Self {
        SeedSet(vec![v])
    }

    /// Parse a comma separated id list such as `"1,5,9"`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let ids = text
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidParameter(format!("bad node id {t:?} in seed list")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ids, n)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// This set plus `v`.
    pub fn with(&self, v: usize) -> SeedSet {
        let mut ids = self.0.clone();
        if let Err(pos) = ids.binary_search(&v) {
            ids.insert(pos, v);
        }
        SeedSet(ids)
    }

    pub fn is_subset(&self, other: &SeedSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::EmptySeedSet);
        }
        match self.0.last() {
            Some(&node) if node >= n => Err(Error::NodeOutOfRange { node, n }),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_endpoints_and_probabilities() {
        assert!(Graph::with_unit_weights(2, vec![Edge::new(0, 2, 0.5)]).is_err());
        assert!(Graph::with_unit_weights(2, vec![Edge::new(0, 1, 1.5)]).is_err());
        assert!(Graph::with_unit_weights(2, vec![Edge::new(0, 1, -0.1)]).is_err());
        assert!(Graph::new(2, vec![], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn group_must_share_tail_and_probability() {
        let mixed_tail = vec![Edge::grouped(0, 1, 0.5, 7), Edge::grouped(1, 2, 0.5, 7)];
        assert!(Graph::with_unit_weights(3, mixed_tail).is_err());
        let mixed_p = vec![Edge::grouped(0, 1, 0.5, 7), Edge::grouped(0, 2, 0.4, 7)];
        assert!(Graph::with_unit_weights(3, mixed_p).is_err());
        let ok = vec![Edge::grouped(0, 1, 0.5, 7), Edge::grouped(0, 2, 0.5, 7)];
        assert!(Graph::with_unit_weights(3, ok).is_ok());
    }

    #[test]
    fn adjacency_lists_follow_edge_ids() {
        let g = Graph::with_unit_weights(
            3,
            vec![Edge::new(0, 1, 1.0), Edge::new(0, 2, 1.0), Edge::new(1, 2, 1.0)],
        )
        .unwrap();
        assert_eq!(g.out_edges(0), &[0, 1]);
        assert_eq!(g.out_edges(2), &[] as &[usize]);
        assert_eq!(g.in_edges(2), &[1, 2]);
        assert_eq!(g.in_degree(1), 1);
    }

    #[test]
    fn seed_sets_sort_dedup_and_validate() {
        let s = SeedSet::parse("5, 1,5,3", 6).unwrap();
        assert_eq!(s.as_slice(), &[1, 3, 5]);
        assert!(SeedSet::parse("1,6", 6).is_err());
        assert!(SeedSet::parse("x", 6).is_err());
        assert_eq!(s.with(2).as_slice(), &[1, 2, 3, 5]);
        assert_eq!(s.with(3), s);
        assert!(matches!(SeedSet::empty().check(3), Err(Error::EmptySeedSet)));
    }
}
