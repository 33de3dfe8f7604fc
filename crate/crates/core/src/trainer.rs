//! Teacher-labelled corpus generation and joint training of the surrogate
//! and the autoencoder.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autoencoder::{self, recon_loss_and_grads, AutoencoderParams};
use crate::diffusion::{rollout, ActivationMask, SeedMask};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{adam_step, AdamConfig, AdamState};
use crate::operator::NormalizedOperator;
use crate::rng;
use crate::surrogate::{self, loss_and_param_grads, SurrogateParams};
use crate::weights::{CostBenefit, EdgeProbabilities};

#[derive(Debug, Clone)]
pub struct TrainingSample {
    pub x: SeedMask,
    pub y: ActivationMask,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Distinct seed masks drawn for the corpus.
    pub masks: usize,
    /// Independent teacher rollouts per mask; the corpus size is
    /// `masks * labels_per_mask`.
    pub labels_per_mask: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub lambda_diff: f64,
    pub lambda_ae: f64,
    pub adam: AdamConfig,
    pub hidden: usize,
    /// Learn the surrogate's bias terms; when off they stay at zero.
    pub surrogate_bias: bool,
    pub ae_hidden: usize,
    pub latent: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            masks: 400,
            labels_per_mask: 5,
            epochs: 300,
            batch_size: 32,
            lambda_diff: 1.0,
            lambda_ae: 1.0,
            adam: AdamConfig::default(),
            hidden: surrogate::DEFAULT_HIDDEN,
            surrogate_bias: true,
            ae_hidden: autoencoder::DEFAULT_HIDDEN,
            latent: autoencoder::DEFAULT_LATENT,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Invalid(format!("train config: {m}")));
        if self.masks == 0 || self.labels_per_mask == 0 {
            return bad("corpus must contain at least one sample");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if !(self.lambda_diff >= 0.0 && self.lambda_ae >= 0.0) {
            return bad("loss weights must be non-negative");
        }
        if self.hidden == 0 || self.ae_hidden == 0 || self.latent == 0 {
            return bad("layer widths must be at least 1");
        }
        if !(self.adam.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        Ok(())
    }
}

/// Draws one budget-feasible mask: a target size `k ~ U[1, k_max]` with
/// `k_max = ⌊B / min c⌋`, then random distinct nodes that still fit.
pub fn sample_feasible_mask(cost: &[f64], budget: f64, rng: &mut rng::Rng) -> SeedMask {
    let n = cost.len();
    let min_cost = cost.iter().copied().fold(f64::INFINITY, f64::min);
    let k_max = ((budget / min_cost).floor() as usize).clamp(1, n);
    let k = rng.random_range(1..=k_max);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut mask = SeedMask::empty(n);
    let (mut spent, mut size) = (0.0, 0);
    for i in order {
        if size == k {
            break;
        }
        if spent + cost[i] <= budget {
            mask.insert(i);
            spent += cost[i];
            size += 1;
        }
    }
    mask
}

/// Teacher-labelled corpus. Mask `m` uses stream `(seed, m)`; its `l`-th
/// label uses an independent stream derived from both indices.
pub fn generate_training_set(
    g: &Graph,
    p: &EdgeProbabilities,
    cb: &CostBenefit,
    budget: f64,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<Vec<TrainingSample>> {
    cfg.validate()?;
    let min_cost = cb.min_cost();
    if !(budget >= min_cost) {
        return Err(Error::InfeasibleBudget { budget, min_cost });
    }
    let label_root = rng::derive_seed(seed, u64::MAX);
    let per_mask: Vec<Vec<TrainingSample>> = (0..cfg.masks)
        .into_par_iter()
        .map(|m| {
            let x = sample_feasible_mask(&cb.cost, budget, &mut rng::stream(seed, m as u64));
            let label_seed = rng::derive_seed(label_root, m as u64);
            (0..cfg.labels_per_mask)
                .map(|l| {
                    let y = rollout(g, p, &x, &mut rng::stream(label_seed, l as u64));
                    TrainingSample { x: x.clone(), y }
                })
                .collect()
        })
        .collect();
    Ok(per_mask.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub l_diff: f64,
    pub l_ae: f64,
    pub l_total: f64,
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub theta: SurrogateParams,
    pub phi: AutoencoderParams,
    pub history: Vec<EpochLoss>,
}

fn as_pairs(samples: &[(Vec<f64>, Vec<f64>)], idx: &[usize]) -> Vec<(Vec<f64>, Vec<f64>)> {
    idx.iter().map(|&i| samples[i].clone()).collect()
}

/// Corpus-wide losses `(L_diff, L_AE)` for given parameters.
pub fn corpus_losses(
    theta: &SurrogateParams,
    phi: &AutoencoderParams,
    a: &NormalizedOperator,
    samples: &[TrainingSample],
) -> Result<(f64, f64)> {
    let dense: Vec<(Vec<f64>, Vec<f64>)> = samples.iter().map(|s| (s.x.to_soft(), s.y.to_soft())).collect();
    let pairs: Vec<(&[f64], &[f64])> = dense.iter().map(|(x, y)| (x.as_slice(), y.as_slice())).collect();
    let xs: Vec<&[f64]> = dense.iter().map(|(x, _)| x.as_slice()).collect();
    let (ld, _) = loss_and_param_grads(theta, a, &pairs)?;
    let (la, _) = recon_loss_and_grads(phi, &xs)?;
    Ok((ld, la))
}

/// Minimises `λ_diff·L_diff(θ) + λ_AE·L_AE(φ)` with Adam over shuffled
/// mini-batches; each batch feeds both terms. The two terms touch disjoint
/// parameters, so each group gets its own gradient and Adam state.
pub fn train(a: &NormalizedOperator, samples: &[TrainingSample], cfg: &TrainConfig, seed: u64) -> Result<TrainedModel> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let n = a.dim();
    if let Some(bad) = samples.iter().find(|s| s.x.len() != n || s.y.as_slice().len() != n) {
        return Err(crate::error::shape_err(n, bad.x.len()));
    }
    let mut theta = SurrogateParams::init(cfg.hidden, rng::derive_seed(seed, 0))?;
    let mut phi = AutoencoderParams::init(n, cfg.ae_hidden, cfg.latent, rng::derive_seed(seed, 1))?;
    let mut shuffle_rng = rng::stream(seed, 2);

    let mut theta_state: Vec<AdamState> = theta.tensors().iter().map(|t| AdamState::new(t.len(), cfg.adam)).collect();
    let mut phi_state: Vec<AdamState> = phi.tensors().iter().map(|t| AdamState::new(t.len(), cfg.adam)).collect();

    let dense: Vec<(Vec<f64>, Vec<f64>)> = samples.iter().map(|s| (s.x.to_soft(), s.y.to_soft())).collect();
    let mut order: Vec<usize> = (0..dense.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let (mut sum_diff, mut sum_ae) = (0.0, 0.0);
        for chunk in order.chunks(cfg.batch_size) {
            let batch = as_pairs(&dense, chunk);
            let pairs: Vec<(&[f64], &[f64])> = batch.iter().map(|(x, y)| (x.as_slice(), y.as_slice())).collect();
            let xs: Vec<&[f64]> = batch.iter().map(|(x, _)| x.as_slice()).collect();

            let (l_diff, mut g_theta) = loss_and_param_grads(&theta, a, &pairs)?;
            if cfg.lambda_diff > 0.0 {
                // W1, W2 first, then the biases
                let trainable = if cfg.surrogate_bias { 4 } else { 2 };
                for ((t, g), st) in theta
                    .tensors_mut()
                    .into_iter()
                    .zip(g_theta.tensors_mut())
                    .zip(&mut theta_state)
                    .take(trainable)
                {
                    g.iter_mut().for_each(|v| *v *= cfg.lambda_diff);
                    adam_step(t, g, st)?;
                }
            }

            let (l_ae, mut g_phi) = recon_loss_and_grads(&phi, &xs)?;
            if cfg.lambda_ae > 0.0 {
                for ((t, g), st) in phi.tensors_mut().into_iter().zip(g_phi.tensors_mut()).zip(&mut phi_state) {
                    g.iter_mut().for_each(|v| *v *= cfg.lambda_ae);
                    adam_step(t, g, st)?;
                }
            }

            sum_diff += l_diff * chunk.len() as f64;
            sum_ae += l_ae * chunk.len() as f64;
        }
        let l_diff = sum_diff / dense.len() as f64;
        let l_ae = sum_ae / dense.len() as f64;
        history.push(EpochLoss {
            epoch,
            l_diff,
            l_ae,
            l_total: cfg.lambda_diff * l_diff + cfg.lambda_ae * l_ae,
        });
    }
    if !(theta.is_finite() && phi.is_finite()) {
        return Err(Error::Invalid("training diverged to non-finite parameters".into()));
    }
    Ok(TrainedModel { theta, phi, history })
}
