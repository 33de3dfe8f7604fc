//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code paths it is used to check.
#![allow(dead_code)]

use deeppm_core::{EdgeProbabilities, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact activation probabilities by enumerating every live-edge world.
pub fn exact_activation(g: &Graph, p: &EdgeProbabilities, seeds: &[usize]) -> Vec<f64> {
    let arcs: Vec<(usize, usize)> = g.arcs().collect();
    let m = arcs.len();
    assert!(m <= 20, "enumeration oracle is for tiny graphs");
    let n = g.node_count();
    let mut probs = vec![0.0; n];
    for world in 0u32..(1 << m) {
        let mut weight = 1.0;
        for (e, _) in arcs.iter().enumerate() {
            let pe = p.get(e);
            weight *= if world >> e & 1 == 1 { pe } else { 1.0 - pe };
        }
        if weight == 0.0 {
            continue;
        }
        // fixed-point reachability over live arcs
        let mut active = vec![false; n];
        for &s in seeds {
            active[s] = true;
        }
        loop {
            let mut changed = false;
            for (e, &(u, v)) in arcs.iter().enumerate() {
                if world >> e & 1 == 1 && active[u] && !active[v] {
                    active[v] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for i in 0..n {
            if active[i] {
                probs[i] += weight;
            }
        }
    }
    // summed world weights can overshoot 1 by an ulp
    probs.into_iter().map(|q| q.clamp(0.0, 1.0)).collect()
}

pub fn central_diff(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut x = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = x[i];
            x[i] = orig + h;
            let up = f(&x);
            x[i] = orig - h;
            let down = f(&x);
            x[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `‖a - b‖ / max(‖a‖, ‖b‖)`, with a floor on the denominator so that two
/// vanishing gradients compare as equal.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(a).max(norm(b)).max(1e-10)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected random graph on `n` nodes: a random spanning path plus extra
/// edges with probability `density`.
pub fn random_graph(n: usize, density: f64, directed: bool, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((r.random_range(0..i), i));
    }
    for u in 0..n {
        for v in 0..n {
            if u != v && r.random::<f64>() < density {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges, directed).unwrap()
}

pub fn uniform_vec(r: &mut ChaCha8Rng, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| r.random_range(lo..hi)).collect()
}

/// Every subset of `0..n` as a sorted index list.
pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1 << n)).map(move |bits| (0..n).filter(|&i| bits >> i & 1 == 1).collect())
}
