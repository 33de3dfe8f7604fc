//! Small synthetic graphs for fixtures, benchmarks and smoke runs.

use rand::Rng as _;

use crate::error::Result;
use crate::graph::Graph;
use crate::rng;

/// G(n, p) random graph.
pub fn erdos_renyi(n: usize, p: f64, directed: bool, seed: u64) -> Result<Graph> {
    let mut r = rng::seeded(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        let lo = if directed { 0 } else { u + 1 };
        for v in lo..n {
            if u != v && r.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges, directed)
}

/// Two equal communities with intra-community edge density `p_in`, joined
/// by `bridges` random cross edges. Undirected.
pub fn two_communities(n: usize, p_in: f64, bridges: usize, seed: u64) -> Result<Graph> {
    let mut r = rng::seeded(seed);
    let half = n / 2;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if (u < half) == (v < half) && r.random::<f64>() < p_in {
                edges.push((u, v));
            }
        }
    }
    for _ in 0..bridges {
        let u = r.random_range(0..half);
        let v = r.random_range(half..n);
        edges.push((u, v));
    }
    Graph::from_edges(n, &edges, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn communities_are_connected_by_bridges_only() {
        let g = two_communities(50, 0.3, 3, 1).unwrap();
        let cross = g.arcs().filter(|&(u, v)| (u < 25) != (v < 25)).count();
        assert!(cross > 0 && cross <= 6);
        assert!(g.undirected_edge_count() > 100);
    }

    #[test]
    fn generators_are_seeded() {
        assert_eq!(erdos_renyi(20, 0.2, true, 4).unwrap(), erdos_renyi(20, 0.2, true, 4).unwrap());
    }
}
