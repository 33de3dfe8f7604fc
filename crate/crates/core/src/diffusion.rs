//! Independent Cascade simulation: the ground-truth teacher.

use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{shape_err, Error, Result};
use crate::graph::Graph;
use crate::rng;
use crate::weights::{CostBenefit, EdgeProbabilities};

/// Rollouts per parallel work unit. Fixed so that the merge order, and hence
/// every floating-point sum, is independent of the worker count.
const BLOCK: usize = 256;

/// Hard seed mask over the nodes of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeedMask(Vec<bool>);

impl SeedMask {
    pub fn empty(n: usize) -> Self {
        SeedMask(vec![false; n])
    }

    pub fn from_nodes(n: usize, nodes: &[usize]) -> Self {
        let mut m = Self::empty(n);
        for &i in nodes {
            m.0[i] = true;
        }
        m
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        SeedMask(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i] = true;
    }

    pub fn remove(&mut self, i: usize) {
        self.0[i] = false;
    }

    /// Selected node indices, ascending.
    pub fn nodes(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i).collect()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&s| s).count()
    }

    /// Total selection cost `c^T x`.
    pub fn cost(&self, costs: &[f64]) -> f64 {
        self.0.iter().zip(costs).filter(|(&s, _)| s).map(|(_, c)| c).sum()
    }

    pub fn to_soft(&self) -> Vec<f64> {
        self.0.iter().map(|&s| if s { 1.0 } else { 0.0 }).collect()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

/// Final activation outcome of one cascade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationMask(Vec<bool>);

impl ActivationMask {
    #[inline]
    pub fn is_active(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&a| a).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn to_soft(&self) -> Vec<f64> {
        self.0.iter().map(|&s| if s { 1.0 } else { 0.0 }).collect()
    }

    pub fn benefit(&self, benefit: &[f64]) -> f64 {
        self.0.iter().zip(benefit).filter(|(&a, _)| a).map(|(_, b)| b).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfitEstimate {
    pub expected_benefit: f64,
    pub seed_cost: f64,
    pub profit: f64,
    pub std_error: f64,
    pub rollouts: usize,
}

fn check_len(g: &Graph, x: &SeedMask) -> Result<()> {
    if x.len() != g.node_count() {
        return Err(shape_err(g.node_count(), x.len()));
    }
    Ok(())
}

struct Scratch {
    active: Vec<bool>,
    frontier: Vec<usize>,
    next: Vec<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            active: vec![false; n],
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }
}

// Wave-by-wave cascade. Leaves the outcome in `s.active`.
fn cascade(g: &Graph, p: &EdgeProbabilities, x: &SeedMask, rng: &mut rng::Rng, s: &mut Scratch) {
    s.active.copy_from_slice(x.as_slice());
    s.frontier.clear();
    s.frontier.extend(x.nodes());
    while !s.frontier.is_empty() {
        s.next.clear();
        for &u in &s.frontier {
            for (arc, v) in g.out_arcs(u) {
                if !s.active[v] && rng.random::<f64>() < p.get(arc) {
                    s.active[v] = true;
                    s.next.push(v);
                }
            }
        }
        std::mem::swap(&mut s.frontier, &mut s.next);
    }
}

/// One discrete-time IC cascade from the seeds in `x`. Every newly active
/// node gets a single attempt at each inactive out-neighbor; the process
/// stops after a wave with no new activations.
pub fn rollout(g: &Graph, p: &EdgeProbabilities, x: &SeedMask, rng: &mut rng::Rng) -> ActivationMask {
    let mut s = Scratch::new(g.node_count());
    cascade(g, p, x, rng, &mut s);
    ActivationMask(s.active)
}

#[derive(Default)]
struct Tally {
    counts: Vec<u64>,
    benefit_sum: f64,
    benefit_sq: f64,
}

// Runs rollouts `0..r`; rollout `k` draws from stream `(seed, k)`.
fn simulate(g: &Graph, p: &EdgeProbabilities, x: &SeedMask, r: usize, seed: u64, benefit: Option<&[f64]>) -> Tally {
    let n = g.node_count();
    let blocks: Vec<Tally> = (0..r.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut s = Scratch::new(n);
            let mut t = Tally {
                counts: vec![0; n],
                ..Default::default()
            };
            for k in b * BLOCK..((b + 1) * BLOCK).min(r) {
                let mut rng = rng::stream(seed, k as u64);
                cascade(g, p, x, &mut rng, &mut s);
                let mut total = 0.0;
                for (i, &a) in s.active.iter().enumerate() {
                    if a {
                        t.counts[i] += 1;
                        if let Some(b) = benefit {
                            total += b[i];
                        }
                    }
                }
                t.benefit_sum += total;
                t.benefit_sq += total * total;
            }
            t
        })
        .collect();
    let mut out = Tally {
        counts: vec![0; n],
        ..Default::default()
    };
    for t in blocks {
        for (o, c) in out.counts.iter_mut().zip(&t.counts) {
            *o += c;
        }
        out.benefit_sum += t.benefit_sum;
        out.benefit_sq += t.benefit_sq;
    }
    out
}

/// Monte Carlo estimate of each node's activation probability `p_i(x)`.
pub fn estimate_activation(
    g: &Graph,
    p: &EdgeProbabilities,
    x: &SeedMask,
    rollouts: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_len(g, x)?;
    if rollouts == 0 {
        return Err(Error::Invalid("rollout count must be at least 1".into()));
    }
    let t = simulate(g, p, x, rollouts, seed, None);
    Ok(t.counts.iter().map(|&c| c as f64 / rollouts as f64).collect())
}

/// Teacher estimate of the profit `b^T p(x) - c^T x`.
pub fn evaluate_profit(
    g: &Graph,
    p: &EdgeProbabilities,
    cb: &CostBenefit,
    x: &SeedMask,
    rollouts: usize,
    seed: u64,
) -> Result<ProfitEstimate> {
    check_len(g, x)?;
    if cb.len() != g.node_count() {
        return Err(shape_err(g.node_count(), cb.len()));
    }
    if rollouts == 0 {
        return Err(Error::Invalid("rollout count must be at least 1".into()));
    }
    let t = simulate(g, p, x, rollouts, seed, Some(&cb.benefit));
    let r = rollouts as f64;
    let expected_benefit: f64 = t
        .counts
        .iter()
        .zip(&cb.benefit)
        .map(|(&c, b)| b * (c as f64 / r))
        .sum();
    let mean = t.benefit_sum / r;
    let var = if rollouts > 1 {
        ((t.benefit_sq - r * mean * mean) / (r - 1.0)).max(0.0)
    } else {
        0.0
    };
    let seed_cost = x.cost(&cb.cost);
    Ok(ProfitEstimate {
        expected_benefit,
        seed_cost,
        profit: expected_benefit - seed_cost,
        std_error: (var / r).sqrt(),
        rollouts,
    })
}

/// A live-edge realization: each arc is independently live with its
/// transmission probability. IC activation equals reachability from the
/// seeds through live arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiveEdgeWorld {
    live: Vec<bool>,
}

impl LiveEdgeWorld {
    pub fn from_live(live: Vec<bool>) -> Self {
        LiveEdgeWorld { live }
    }

    #[inline]
    pub fn is_live(&self, arc: usize) -> bool {
        self.live[arc]
    }
}

pub fn sample_world(g: &Graph, p: &EdgeProbabilities, rng: &mut rng::Rng) -> LiveEdgeWorld {
    LiveEdgeWorld {
        live: (0..g.arc_count()).map(|e| rng.random::<f64>() < p.get(e)).collect(),
    }
}

/// Marks every node reachable from `sources` through live arcs in `active`
/// (nodes already marked are treated as visited and not expanded again).
/// Returns the summed `weight` of newly marked nodes.
pub fn spread_in_world(
    g: &Graph,
    world: &LiveEdgeWorld,
    sources: impl IntoIterator<Item = usize>,
    active: &mut [bool],
    stack: &mut Vec<usize>,
    weight: &[f64],
) -> f64 {
    let mut gained = 0.0;
    stack.clear();
    for s in sources {
        if !active[s] {
            active[s] = true;
            gained += weight[s];
            stack.push(s);
        }
    }
    while let Some(u) = stack.pop() {
        for (arc, v) in g.out_arcs(u) {
            if !active[v] && world.is_live(arc) {
                active[v] = true;
                gained += weight[v];
                stack.push(v);
            }
        }
    }
    gained
}

pub fn rollout_in_world(g: &Graph, world: &LiveEdgeWorld, x: &SeedMask) -> ActivationMask {
    let mut active = vec![false; g.node_count()];
    let zeros = vec![0.0; g.node_count()];
    spread_in_world(g, world, x.nodes(), &mut active, &mut Vec::new(), &zeros);
    ActivationMask(active)
}
