use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Undirected weighted graph. Edges are stored once, with `u < v`, sorted
/// lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    node_count: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn empty(node_count: usize) -> Self {
        WeightedGraph { node_count, edges: Vec::new() }
    }

    /// Build a graph from `(u, v, weight)` triples in any orientation.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut map = BTreeMap::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop on node {a}")));
            }
            if a >= node_count || b >= node_count {
                return Err(Error::invalid(format!(
                    "edge ({a}, {b}) out of range for {node_count} nodes"
                )));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::invalid(format!("edge ({a}, {b}) has weight {w}")));
            }
            let key = (a.min(b), a.max(b));
            if map.insert(key, w).is_some() {
                return Err(Error::invalid(format!("duplicate edge {key:?}")));
            }
        }
        Ok(WeightedGraph {
            node_count,
            edges: map.into_iter().map(|((u, v), weight)| Edge { u, v, weight }).collect(),
        })
    }

    pub(crate) fn from_map(node_count: usize, map: BTreeMap<(usize, usize), f64>) -> Self {
        WeightedGraph {
            node_count,
            edges: map.into_iter().map(|((u, v), weight)| Edge { u, v, weight }).collect(),
        }
    }

    pub(crate) fn to_map(&self) -> BTreeMap<(usize, usize), f64> {
        self.edges.iter().map(|e| ((e.u, e.v), e.weight)).collect()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edges_mut(&mut self) -> &mut [Edge] {
        &mut self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search_by(|e| (e.u, e.v).cmp(&key)).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// Edge set of the subgraph induced on `nodes`, relabeled so that
    /// `nodes[i]` becomes `i`.
    pub fn induced(&self, nodes: &[usize]) -> WeightedGraph {
        let mut index = vec![usize::MAX; self.node_count];
        for (i, &n) in nodes.iter().enumerate() {
            index[n] = i;
        }
        let mut map = BTreeMap::new();
        for e in &self.edges {
            let (a, b) = (index[e.u], index[e.v]);
            if a != usize::MAX && b != usize::MAX {
                map.insert((a.min(b), a.max(b)), e.weight);
            }
        }
        WeightedGraph::from_map(nodes.len(), map)
    }
}
