//! Seed selection with the trained student: gradient ascent on the
//! penalized surrogate profit in the decoder's latent space, then greedy
//! rounding to a budget-feasible hard mask.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autoencoder::{decode_cached, decode_vjp, AutoencoderParams};
use crate::checkpoint::Checkpoint;
use crate::diffusion::SeedMask;
use crate::error::{shape_err, Error, Result};
use crate::graph::Graph;
use crate::numerics::dot;
use crate::operator::NormalizedOperator;
use crate::rng;
use crate::surrogate::{forward, input_gradient_from_cache, predict, SurrogateParams};
use crate::weights::CostBenefit;

const MAX_HALVINGS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    /// Budget penalty weight; `None` means `10 · max b / min c`.
    pub mu: Option<f64>,
    pub ascent_steps: usize,
    /// Length of each accepted move in latent space before halving.
    pub step_size: f64,
    pub restarts: usize,
    /// Only the top candidates by soft score are considered when rounding.
    pub candidate_cap: usize,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            mu: None,
            ascent_steps: 200,
            step_size: 0.05,
            restarts: 8,
            candidate_cap: 256,
        }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(mu) = self.mu {
            if !(mu >= 0.0) {
                return Err(Error::Invalid(format!("penalty weight {mu} must be non-negative")));
            }
        }
        if self.restarts == 0 || self.candidate_cap == 0 {
            return Err(Error::Invalid("restarts and candidate_cap must be at least 1".into()));
        }
        if !(self.step_size > 0.0) {
            return Err(Error::Invalid("step_size must be positive".into()));
        }
        Ok(())
    }

    pub fn resolve_mu(&self, cb: &CostBenefit) -> f64 {
        self.mu.unwrap_or_else(|| 10.0 * cb.max_benefit() / cb.min_cost())
    }
}

/// The penalized latent objective
/// `Π(z) = b·p̂(x(z)) - c·x(z) - μ·max(0, c·x(z) - B)` with `x(z) = σ(dec(z))`.
#[derive(Debug, Clone, Copy)]
pub struct LatentObjective<'a> {
    pub theta: &'a SurrogateParams,
    pub phi: &'a AutoencoderParams,
    pub a: &'a NormalizedOperator,
    pub benefit: &'a [f64],
    pub cost: &'a [f64],
    pub budget: f64,
    pub mu: f64,
}

impl LatentObjective<'_> {
    fn check(&self) -> Result<()> {
        let n = self.a.dim();
        for len in [self.benefit.len(), self.cost.len(), self.phi.nodes()] {
            if len != n {
                return Err(shape_err(n, len));
            }
        }
        Ok(())
    }

    pub fn value(&self, z: &[f64]) -> Result<f64> {
        self.check()?;
        let x = decode_cached(self.phi, z)?.out;
        let p = predict(self.theta, self.a, &x)?;
        let spend = dot(self.cost, &x);
        Ok(dot(self.benefit, &p) - spend - self.mu * (spend - self.budget).max(0.0))
    }

    /// Objective, gradient w.r.t. `z`, and the decoded soft mask.
    pub fn value_and_grad(&self, z: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        self.check()?;
        let dec = decode_cached(self.phi, z)?;
        let fwd = forward(self.theta, self.a, &dec.out)?;
        let spend = dot(self.cost, &dec.out);
        let over = spend - self.budget;
        let value = dot(self.benefit, &fwd.probs) - spend - self.mu * over.max(0.0);
        // hinge subgradient at equality is 0
        let penalty_slope = if over > 0.0 { self.mu } else { 0.0 };
        let mut g_x = input_gradient_from_cache(self.theta, self.a, &fwd, self.benefit)?;
        for (g, c) in g_x.iter_mut().zip(self.cost) {
            *g -= (1.0 + penalty_slope) * c;
        }
        let g_z = decode_vjp(self.phi, z, &dec, &g_x);
        Ok((value, g_z, dec.out))
    }
}

#[allow(clippy::too_many_arguments)]
pub fn penalized_objective(
    z: &[f64],
    theta: &SurrogateParams,
    phi: &AutoencoderParams,
    a: &NormalizedOperator,
    benefit: &[f64],
    cost: &[f64],
    budget: f64,
    mu: f64,
) -> Result<f64> {
    LatentObjective {
        theta,
        phi,
        a,
        benefit,
        cost,
        budget,
        mu,
    }
    .value(z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentResult {
    pub z: Vec<f64>,
    pub x_soft: Vec<f64>,
    pub objective: f64,
    /// Objective at this restart's initial point.
    pub initial_objective: f64,
    pub restart: usize,
}

fn ascend(obj: &LatentObjective, mut z: Vec<f64>, steps: usize, step_size: f64, restart: usize) -> Result<AscentResult> {
    let (mut value, mut grad, mut x_soft) = obj.value_and_grad(&z)?;
    let initial_objective = value;
    for _ in 0..steps {
        let norm = dot(&grad, &grad).sqrt();
        if !(norm > 0.0) {
            break;
        }
        let mut eta = step_size;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let cand: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| zi + eta * gi / norm).collect();
            let (v, g, x) = obj.value_and_grad(&cand)?;
            if v > value {
                (z, value, grad, x_soft) = (cand, v, g, x);
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(AscentResult {
        z,
        x_soft,
        objective: value,
        initial_objective,
        restart,
    })
}

/// Multi-start ascent from standard-normal latent points. Each step moves
/// `step_size` along the normalized gradient and is halved (up to five
/// times) until the objective improves; a step that never improves ends the
/// restart. The best final objective wins, lowest restart index on ties.
pub fn latent_ascent(obj: &LatentObjective, cfg: &InferenceConfig, seed: u64) -> Result<AscentResult> {
    Ok(ascent_runs(obj, cfg, seed)?
        .into_iter()
        .reduce(|best, r| if r.objective > best.objective { r } else { best })
        .expect("at least one restart"))
}

/// Every restart's final point, in restart order.
pub fn ascent_runs(obj: &LatentObjective, cfg: &InferenceConfig, seed: u64) -> Result<Vec<AscentResult>> {
    cfg.validate()?;
    let latent = obj.phi.latent();
    (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, r as u64);
            let z0: Vec<f64> = (0..latent).map(|_| StandardNormal.sample(&mut rng)).collect();
            ascend(obj, z0, cfg.ascent_steps, cfg.step_size, r)
        })
        .collect()
}

/// `b·p̂(x) - c·x` under the surrogate.
pub fn surrogate_profit(theta: &SurrogateParams, a: &NormalizedOperator, x: &[f64], benefit: &[f64], cost: &[f64]) -> Result<f64> {
    Ok(dot(benefit, &predict(theta, a, x)?) - dot(cost, x))
}

/// Greedy rounding of a soft mask. Candidates are ranked by descending soft
/// score (lower index first on ties) and capped at `candidate_cap`; each
/// iteration adds the highest-ranked candidate that fits the remaining budget
/// and has positive surrogate marginal profit, evaluated on hard masks.
pub fn greedy_round(
    x_soft: &[f64],
    theta: &SurrogateParams,
    a: &NormalizedOperator,
    benefit: &[f64],
    cost: &[f64],
    budget: f64,
    candidate_cap: usize,
) -> Result<SeedMask> {
    let n = a.dim();
    for len in [x_soft.len(), benefit.len(), cost.len()] {
        if len != n {
            return Err(shape_err(n, len));
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| x_soft[j].total_cmp(&x_soft[i]).then(i.cmp(&j)));
    order.truncate(candidate_cap);

    let mut chosen = SeedMask::empty(n);
    let mut hard = vec![0.0; n];
    let mut spent = 0.0;
    let mut current = surrogate_profit(theta, a, &hard, benefit, cost)?;
    loop {
        let open: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&i| !chosen.contains(i) && spent + cost[i] <= budget)
            .collect();
        // evaluate in rank-ordered chunks, stop at the first chunk with a hit
        let mut pick = None;
        for chunk in open.chunks(rayon::current_num_threads().max(1) * 2) {
            let gains: Vec<(usize, f64)> = chunk
                .par_iter()
                .map(|&i| {
                    let mut x = hard.clone();
                    x[i] = 1.0;
                    surrogate_profit(theta, a, &x, benefit, cost).map(|v| (i, v))
                })
                .collect::<Result<_>>()?;
            if let Some(&(i, v)) = gains.iter().find(|(_, v)| v - current > 0.0) {
                pick = Some((i, v));
                break;
            }
        }
        match pick {
            Some((i, v)) => {
                chosen.insert(i);
                hard[i] = 1.0;
                spent += cost[i];
                current = v;
            }
            None => break,
        }
    }
    Ok(chosen)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectionDiagnostics {
    pub soft_objective: f64,
    pub surrogate_profit: f64,
    pub seed_count: usize,
    pub cost_used: f64,
}

/// End-to-end selection from a trained checkpoint.
pub fn select_seeds(
    g: &Graph,
    cb: &CostBenefit,
    budget: f64,
    ckpt: &Checkpoint,
    cfg: &InferenceConfig,
    seed: u64,
) -> Result<(SeedMask, SelectionDiagnostics)> {
    let n = g.node_count();
    if ckpt.nodes != n || ckpt.phi.nodes() != n {
        return Err(Error::NodeCountMismatch {
            expected: ckpt.nodes,
            got: n,
        });
    }
    if cb.len() != n {
        return Err(shape_err(n, cb.len()));
    }
    let a = NormalizedOperator::new(g);
    select_with_operator(&a, cb, budget, &ckpt.theta, &ckpt.phi, cfg, seed)
}

pub(crate) fn select_with_operator(
    a: &NormalizedOperator,
    cb: &CostBenefit,
    budget: f64,
    theta: &SurrogateParams,
    phi: &AutoencoderParams,
    cfg: &InferenceConfig,
    seed: u64,
) -> Result<(SeedMask, SelectionDiagnostics)> {
    let obj = LatentObjective {
        theta,
        phi,
        a,
        benefit: &cb.benefit,
        cost: &cb.cost,
        budget,
        mu: cfg.resolve_mu(cb),
    };
    // Soft objectives overrate fractional masks, so every restart is rounded
    // and the best hard surrogate profit wins (lowest restart on ties).
    let mut best: Option<(SeedMask, f64, f64)> = None;
    for run in ascent_runs(&obj, cfg, seed)? {
        let mask = greedy_round(&run.x_soft, theta, a, &cb.benefit, &cb.cost, budget, cfg.candidate_cap)?;
        let profit = surrogate_profit(theta, a, &mask.to_soft(), &cb.benefit, &cb.cost)?;
        if best.as_ref().is_none_or(|b| profit > b.1) {
            best = Some((mask, profit, run.objective));
        }
    }
    let (mask, surrogate, soft) = best.expect("at least one restart");
    Ok((
        mask.clone(),
        SelectionDiagnostics {
            soft_objective: soft,
            surrogate_profit: surrogate,
            seed_count: mask.count(),
            cost_used: mask.cost(&cb.cost),
        },
    ))
}
