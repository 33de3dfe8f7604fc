//! Structural heuristics: degree, discounted degree, clustering, random.

use rand::seq::SliceRandom;

use crate::diffusion::SeedMask;
use crate::graph::Graph;
use crate::rng;
use crate::weights::CostBenefit;

// Adds nodes in `order`, skipping any that no longer fit.
fn fill_in_order(order: impl IntoIterator<Item = usize>, cb: &CostBenefit, budget: f64) -> SeedMask {
    let mut mask = SeedMask::empty(cb.len());
    let mut spent = 0.0;
    for i in order {
        if spent + cb.cost[i] <= budget {
            mask.insert(i);
            spent += cb.cost[i];
        }
    }
    mask
}

// Repeatedly takes the affordable unselected node with the highest score
// (lowest index on ties) and lets `update` adjust scores afterwards.
fn pick_by_score(
    n: usize,
    cb: &CostBenefit,
    budget: f64,
    mut score: Vec<f64>,
    mut update: impl FnMut(usize, &mut [f64], &SeedMask),
) -> SeedMask {
    let mut mask = SeedMask::empty(n);
    let mut spent = 0.0;
    loop {
        let best = (0..n)
            .filter(|&i| !mask.contains(i) && spent + cb.cost[i] <= budget)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if score[b] >= score[i] => Some(b),
                _ => Some(i),
            });
        let Some(u) = best else { break };
        mask.insert(u);
        spent += cb.cost[u];
        update(u, &mut score, &mask);
    }
    mask
}

pub fn high_degree(g: &Graph, cb: &CostBenefit, budget: f64) -> SeedMask {
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    fill_in_order(order, cb, budget)
}

/// Picks the highest current-degree node, then lowers each unselected
/// neighbor's degree by one.
pub fn single_discount(g: &Graph, cb: &CostBenefit, budget: f64) -> SeedMask {
    let n = g.node_count();
    let score = (0..n).map(|i| g.degree(i) as f64).collect();
    pick_by_score(n, cb, budget, score, |u, score, mask| {
        for &v in g.neighbors(u) {
            if !mask.contains(v as usize) {
                score[v as usize] -= 1.0;
            }
        }
    })
}

/// `dd_v = d_v - 2 t_v - (d_v - t_v) t_v p` for a node of degree `d_v` with
/// `t_v` selected neighbors.
pub fn degree_discount_score(d: f64, t: f64, p: f64) -> f64 {
    d - 2.0 * t - (d - t) * t * p
}

pub fn degree_discount(g: &Graph, cb: &CostBenefit, budget: f64, p: f64) -> SeedMask {
    let n = g.node_count();
    let mut t = vec![0.0; n];
    let score = (0..n).map(|i| g.degree(i) as f64).collect();
    pick_by_score(n, cb, budget, score, |u, score, mask| {
        for &v in g.neighbors(u) {
            let v = v as usize;
            if !mask.contains(v) {
                t[v] += 1.0;
                score[v] = degree_discount_score(g.degree(v) as f64, t[v], p);
            }
        }
    })
}

/// Local clustering coefficient on the undirected collapse; 0 for nodes of
/// degree below 2.
pub fn clustering_coefficients(g: &Graph) -> Vec<f64> {
    (0..g.node_count())
        .map(|u| {
            let nbrs = g.neighbors(u);
            let d = nbrs.len();
            if d < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for &v in nbrs {
                // sorted-list intersection
                let other = g.neighbors(v as usize);
                let (mut i, mut j) = (0, 0);
                while i < nbrs.len() && j < other.len() {
                    match nbrs[i].cmp(&other[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            links += 1;
                            i += 1;
                            j += 1;
                        }
                    }
                }
            }
            // each neighbor-neighbor link was counted from both ends
            links as f64 / (d * (d - 1)) as f64
        })
        .collect()
}

/// Non-increasing clustering coefficient, ties by higher degree then lower
/// index.
pub fn high_clustering(g: &Graph, cb: &CostBenefit, budget: f64) -> SeedMask {
    let cc = clustering_coefficients(g);
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| {
        cc[b].total_cmp(&cc[a])
            .then(g.degree(b).cmp(&g.degree(a)))
            .then(a.cmp(&b))
    });
    fill_in_order(order, cb, budget)
}

pub fn random_selection(g: &Graph, cb: &CostBenefit, budget: f64, seed: u64) -> SeedMask {
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.shuffle(&mut rng::seeded(seed));
    fill_in_order(order, cb, budget)
}
