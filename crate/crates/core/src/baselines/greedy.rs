//! Monte Carlo greedy methods over shared live-edge worlds.

use rand::seq::index;
use rayon::prelude::*;

use super::BaselineConfig;
use crate::diffusion::{sample_world, spread_in_world, LiveEdgeWorld, SeedMask};
use crate::graph::Graph;
use crate::rng;
use crate::weights::{CostBenefit, EdgeProbabilities};

const STOCHASTIC_TAG: u64 = 0x5354_4721;
const DOUBLE_TAG: u64 = 0x4447_0001;

fn sample_worlds(g: &Graph, p: &EdgeProbabilities, count: usize, seed: u64) -> Vec<LiveEdgeWorld> {
    (0..count)
        .into_par_iter()
        .map(|w| sample_world(g, p, &mut rng::stream(seed, w as u64)))
        .collect()
}

struct Scratch {
    active: Vec<bool>,
    stack: Vec<usize>,
    touched: Vec<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            active: vec![false; n],
            stack: Vec::new(),
            touched: Vec::new(),
        }
    }
}

// Benefit of everything reachable from `seeds` in `world`.
fn reach_benefit(g: &Graph, world: &LiveEdgeWorld, seeds: impl IntoIterator<Item = usize>, benefit: &[f64], s: &mut Scratch) -> f64 {
    s.active.iter_mut().for_each(|a| *a = false);
    spread_in_world(g, world, seeds, &mut s.active, &mut s.stack, benefit)
}

// Benefit newly reached from `start` given the already-active set `base`.
fn extra_benefit(g: &Graph, world: &LiveEdgeWorld, base: &[bool], start: usize, benefit: &[f64], s: &mut Scratch) -> f64 {
    if base[start] {
        return 0.0;
    }
    s.touched.clear();
    s.stack.clear();
    s.active[start] = true;
    s.touched.push(start);
    s.stack.push(start);
    let mut gained = benefit[start];
    while let Some(u) = s.stack.pop() {
        for (arc, v) in g.out_arcs(u) {
            if !base[v] && !s.active[v] && world.is_live(arc) {
                s.active[v] = true;
                s.touched.push(v);
                s.stack.push(v);
                gained += benefit[v];
            }
        }
    }
    for &t in &s.touched {
        s.active[t] = false;
    }
    gained
}

// Reach of the current seed set in each world.
fn base_reach(g: &Graph, worlds: &[LiveEdgeWorld], seeds: &[usize]) -> Vec<Vec<bool>> {
    let zeros = vec![0.0; g.node_count()];
    worlds
        .par_iter()
        .map(|w| {
            let mut active = vec![false; g.node_count()];
            spread_in_world(g, w, seeds.iter().copied(), &mut active, &mut Vec::new(), &zeros);
            active
        })
        .collect()
}

fn greedy(
    g: &Graph,
    p: &EdgeProbabilities,
    cb: &CostBenefit,
    budget: f64,
    cfg: &BaselineConfig,
    seed: u64,
    sample_fraction: Option<f64>,
) -> SeedMask {
    let n = g.node_count();
    let mut mask = SeedMask::empty(n);
    let mut spent = 0.0;
    for round in 0u64.. {
        let mut candidates: Vec<usize> = (0..n)
            .filter(|&i| !mask.contains(i) && spent + cb.cost[i] <= budget)
            .collect();
        if candidates.is_empty() {
            break;
        }
        if let Some(eps) = sample_fraction {
            let k = ((eps * candidates.len() as f64).ceil() as usize).clamp(1, candidates.len());
            let mut r = rng::stream(seed ^ STOCHASTIC_TAG, round);
            let mut picked: Vec<usize> = index::sample(&mut r, candidates.len(), k).into_iter().collect();
            picked.sort_unstable();
            candidates = picked.into_iter().map(|j| candidates[j]).collect();
        }

        let worlds = sample_worlds(g, p, cfg.rollouts, rng::derive_seed(seed, round));
        let seeds = mask.nodes();
        let base = base_reach(g, &worlds, &seeds);
        let gains: Vec<f64> = candidates
            .par_iter()
            .map_init(
                || Scratch::new(n),
                |s, &i| {
                    let total: f64 = worlds
                        .iter()
                        .zip(&base)
                        .map(|(w, b)| extra_benefit(g, w, b, i, &cb.benefit, s))
                        .sum();
                    total / worlds.len() as f64 - cb.cost[i]
                },
            )
            .collect();

        let (best, gain) = candidates
            .iter()
            .zip(&gains)
            .fold((usize::MAX, f64::NEG_INFINITY), |acc, (&i, &g)| if g > acc.1 { (i, g) } else { acc });
        if !(gain > 0.0) {
            break;
        }
        mask.insert(best);
        spent += cb.cost[best];
    }
    mask
}

/// Adds the affordable node with the largest estimated marginal profit until
/// none is affordable or the best gain is not positive.
pub fn simple_greedy(g: &Graph, p: &EdgeProbabilities, cb: &CostBenefit, budget: f64, cfg: &BaselineConfig, seed: u64) -> SeedMask {
    greedy(g, p, cb, budget, cfg, seed, None)
}

/// Simple greedy restricted each round to a uniform sample of
/// `⌈ε · |candidates|⌉` affordable nodes. World sampling uses the same
/// streams as [`simple_greedy`], so `ε = 1` reproduces it.
pub fn stochastic_greedy(g: &Graph, p: &EdgeProbabilities, cb: &CostBenefit, budget: f64, cfg: &BaselineConfig, seed: u64) -> SeedMask {
    greedy(g, p, cb, budget, cfg, seed, Some(cfg.epsilon))
}

// Mean over worlds of f(world, scratch), summed in world order.
fn mean_over(worlds: &[LiveEdgeWorld], n: usize, f: impl Fn(&LiveEdgeWorld, &mut Scratch) -> f64 + Sync) -> f64 {
    let parts: Vec<f64> = worlds.par_iter().map_init(|| Scratch::new(n), |s, w| f(w, s)).collect();
    parts.iter().sum::<f64>() / worlds.len() as f64
}

/// Deterministic double greedy over nodes in index order, followed by a
/// budget repair pass that drops kept nodes in ascending order of estimated
/// marginal profit until the cost fits.
pub fn double_greedy(g: &Graph, p: &EdgeProbabilities, cb: &CostBenefit, budget: f64, cfg: &BaselineConfig, seed: u64) -> SeedMask {
    let n = g.node_count();
    let b = &cb.benefit;
    let mut grow = SeedMask::empty(n);
    let mut shrink = SeedMask::from_bools(vec![true; n]);
    let root = seed ^ DOUBLE_TAG;

    for i in 0..n {
        let worlds = sample_worlds(g, p, cfg.rollouts, rng::derive_seed(root, i as u64));
        let grow_nodes = grow.nodes();
        let base = base_reach(g, &worlds, &grow_nodes);
        let add_gain = {
            let parts: Vec<f64> = worlds
                .par_iter()
                .zip(&base)
                .map_init(|| Scratch::new(n), |s, (w, bs)| extra_benefit(g, w, bs, i, b, s))
                .collect();
            parts.iter().sum::<f64>() / worlds.len() as f64 - cb.cost[i]
        };
        let shrink_nodes = shrink.nodes();
        let lost = mean_over(&worlds, n, |w, s| {
            let with = reach_benefit(g, w, shrink_nodes.iter().copied(), b, s);
            let without = reach_benefit(g, w, shrink_nodes.iter().copied().filter(|&j| j != i), b, s);
            with - without
        });
        let remove_gain = cb.cost[i] - lost;
        if add_gain >= remove_gain {
            grow.insert(i);
        } else {
            shrink.remove(i);
        }
    }

    if grow.cost(&cb.cost) > budget {
        let kept = grow.nodes();
        let worlds = sample_worlds(g, p, cfg.rollouts, rng::derive_seed(root, n as u64));
        let mut marginal: Vec<(f64, usize)> = kept
            .iter()
            .map(|&i| {
                let loss = mean_over(&worlds, n, |w, s| {
                    reach_benefit(g, w, kept.iter().copied(), b, s)
                        - reach_benefit(g, w, kept.iter().copied().filter(|&j| j != i), b, s)
                });
                (loss - cb.cost[i], i)
            })
            .collect();
        marginal.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let mut spent = grow.cost(&cb.cost);
        for (_, i) in marginal {
            if spent <= budget {
                break;
            }
            grow.remove(i);
            spent -= cb.cost[i];
        }
        // guard against rounding drift in the running total
        if grow.cost(&cb.cost) > budget {
            for i in grow.nodes().into_iter().rev() {
                grow.remove(i);
                if grow.cost(&cb.cost) <= budget {
                    break;
                }
            }
        }
    }
    grow
}
