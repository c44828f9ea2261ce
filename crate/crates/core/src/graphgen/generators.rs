//! Random graph models and the anomaly implant used by the benchmarks.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::graph::WeightedGraph;
use crate::error::{Error, Result};

/// Mean and standard deviation of the edge-weight distribution. Three sigma
/// on either side covers the [0, 100] transaction range.
pub const WEIGHT_MEAN: f64 = 50.0;
pub const WEIGHT_STD: f64 = 50.0 / 3.0;
pub const WEIGHT_MAX: f64 = 100.0;

/// Module index of every node when `n` nodes are split into `modules`
/// contiguous blocks whose sizes differ by at most one (larger blocks first).
pub fn sbm_blocks(n: usize, modules: usize) -> Vec<usize> {
    let base = n / modules;
    let rem = n % modules;
    let mut out = Vec::with_capacity(n);
    for b in 0..modules {
        let size = base + usize::from(b < rem);
        out.extend(std::iter::repeat_n(b, size));
    }
    out
}

/// Stochastic block model with a two-level probability matrix: `p_intra`
/// on the diagonal, `p_inter` everywhere else. Edges carry unit weight.
pub fn gen_sbm<R: Rng + ?Sized>(
    n: usize,
    modules: usize,
    p_intra: f64,
    p_inter: f64,
    rng: &mut R,
) -> Result<WeightedGraph> {
    if n == 0 || modules == 0 {
        return Err(Error::invalid("SBM needs at least one node and one module"));
    }
    if modules > n {
        return Err(Error::invalid(format!("{modules} modules for {n} nodes")));
    }
    if !(0.0 <= p_inter && p_inter <= p_intra && p_intra <= 1.0) {
        return Err(Error::invalid(format!(
            "SBM probabilities must satisfy 0 <= p_inter <= p_intra <= 1 (got {p_inter}, {p_intra})"
        )));
    }
    let block = sbm_blocks(n, modules);
    let mut map = BTreeMap::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if block[u] == block[v] { p_intra } else { p_inter };
            if rng.random::<f64>() < p {
                map.insert((u, v), 1.0);
            }
        }
    }
    Ok(WeightedGraph::from_map(n, map))
}

/// Watts-Strogatz small world graph: ring lattice of mean degree `k`, each
/// lattice edge rewired at one end with probability `beta`.
pub fn gen_watts_strogatz<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    beta: f64,
    rng: &mut R,
) -> Result<WeightedGraph> {
    if !k.is_multiple_of(2) {
        return Err(Error::invalid(format!("mean degree k = {k} must be even")));
    }
    if k >= n && k > 0 {
        return Err(Error::invalid(format!("mean degree k = {k} must be below n = {n}")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid(format!("rewiring probability {beta} outside [0, 1]")));
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.random::<f64>() >= beta {
                continue;
            }
            // Only rewire edges that are still present and when u has a
            // free partner left.
            if !adj[u].contains(&v) || adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    let mut map = BTreeMap::new();
    for (u, nbrs) in adj.iter().enumerate() {
        for &v in nbrs.range(u + 1..) {
            map.insert((u, v), 1.0);
        }
    }
    Ok(WeightedGraph::from_map(n, map))
}

/// Graph produced by [`implant_anomaly`], with the host nodes that received
/// the anomaly (`nodes[i]` hosts anomaly node `i`).
#[derive(Debug, Clone)]
pub struct Implanted {
    pub graph: WeightedGraph,
    pub nodes: Vec<usize>,
}

/// Replace the subgraph induced on a uniformly random node subset of the
/// host by the anomaly graph. Edges crossing the subset boundary survive.
pub fn implant_anomaly<R: Rng + ?Sized>(
    host: &WeightedGraph,
    anomaly: &WeightedGraph,
    rng: &mut R,
) -> Result<Implanted> {
    let n = host.node_count();
    let a = anomaly.node_count();
    if a > n {
        return Err(Error::invalid(format!("anomaly of {a} nodes does not fit host of {n}")));
    }
    let nodes = index::sample(rng, n, a).into_vec();
    let mut inside = vec![false; n];
    for &s in &nodes {
        inside[s] = true;
    }
    let mut map = host.to_map();
    map.retain(|&(u, v), _| !(inside[u] && inside[v]));
    for e in anomaly.edges() {
        let (x, y) = (nodes[e.u], nodes[e.v]);
        map.insert((x.min(y), x.max(y)), e.weight);
    }
    Ok(Implanted { graph: WeightedGraph::from_map(n, map), nodes })
}

/// Redraw every edge weight from N(50, (50/3)²) restricted to [0, 100] by
/// rejection.
pub fn assign_weights<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> WeightedGraph {
    let normal = Normal::new(WEIGHT_MEAN, WEIGHT_STD).expect("valid normal");
    let mut out = g.clone();
    for e in out.edges_mut() {
        e.weight = loop {
            let w = normal.sample(rng);
            if (0.0..=WEIGHT_MAX).contains(&w) {
                break w;
            }
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn blocks_are_near_equal() {
        let b = sbm_blocks(50, 8);
        let mut sizes = [0usize; 8];
        for x in b {
            sizes[x] += 1;
        }
        assert_eq!(sizes, [7, 7, 6, 6, 6, 6, 6, 6]);
    }

    #[test]
    fn sbm_rejects_bad_parameters() {
        let mut rng = seeded(0);
        assert!(gen_sbm(0, 1, 0.5, 0.1, &mut rng).is_err());
        assert!(gen_sbm(10, 0, 0.5, 0.1, &mut rng).is_err());
        assert!(gen_sbm(4, 8, 0.5, 0.1, &mut rng).is_err());
        assert!(gen_sbm(10, 2, 0.1, 0.5, &mut rng).is_err());
    }

    #[test]
    fn sbm_singleton_modules_have_no_edges() {
        let g = gen_sbm(8, 8, 1.0, 0.0, &mut seeded(1)).unwrap();
        assert_eq!(g.node_count(), 8);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn sbm_benchmark_shape() {
        let g = gen_sbm(50, 8, 0.8, 0.05, &mut seeded(2)).unwrap();
        assert_eq!(g.node_count(), 50);
        assert!(g.edges().iter().all(|e| e.weight == 1.0));
    }

    #[test]
    fn ws_rejects_odd_degree() {
        assert!(gen_watts_strogatz(10, 3, 0.2, &mut seeded(0)).is_err());
        assert!(gen_watts_strogatz(4, 4, 0.2, &mut seeded(0)).is_err());
    }

    #[test]
    fn ws_without_rewiring_is_ring_lattice() {
        let g = gen_watts_strogatz(10, 4, 0.0, &mut seeded(3)).unwrap();
        assert_eq!(g.edge_count(), 20);
        assert!(g.degrees().iter().all(|&d| d == 4));
        for u in 0..10 {
            assert!(g.has_edge(u, (u + 1) % 10));
            assert!(g.has_edge(u, (u + 2) % 10));
        }
    }

    #[test]
    fn ws_benchmark_shape() {
        let g = gen_watts_strogatz(10, 4, 0.2, &mut seeded(4)).unwrap();
        assert_eq!(g.node_count(), 10);
        assert_eq!(g.edge_count(), 20);
    }

    #[test]
    fn implant_empty_anomaly_is_identity() {
        let host = gen_sbm(20, 4, 0.8, 0.1, &mut seeded(5)).unwrap();
        let out = implant_anomaly(&host, &WeightedGraph::empty(0), &mut seeded(6)).unwrap();
        assert_eq!(out.graph, host);
        assert!(out.nodes.is_empty());
    }

    #[test]
    fn implant_rejects_oversized_anomaly() {
        let host = WeightedGraph::empty(3);
        let anomaly = WeightedGraph::empty(4);
        assert!(implant_anomaly(&host, &anomaly, &mut seeded(0)).is_err());
    }

    #[test]
    fn weights_stay_in_range_and_empty_graph_untouched() {
        let mut rng = seeded(7);
        let g = gen_sbm(50, 8, 0.8, 0.05, &mut rng).unwrap();
        let w = assign_weights(&g, &mut rng);
        assert_eq!(w.edge_count(), g.edge_count());
        assert!(w.edges().iter().all(|e| (0.0..=100.0).contains(&e.weight)));
        let empty = WeightedGraph::empty(5);
        assert_eq!(assign_weights(&empty, &mut rng), empty);
    }
}
