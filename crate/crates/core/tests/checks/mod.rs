//! Gradient checks against central finite differences, shared by the
//! gradient tests and the acceptance suite.
#![allow(dead_code)]

use crate::common::{central_diff, rel_err, rng, uniform_vec};
use deeppm_core::autoencoder::{recon_loss_and_grads, AutoencoderParams};
use deeppm_core::surrogate::{input_gradient, loss_and_param_grads, predict};
use deeppm_core::{DenseMatrix, LatentObjective, NormalizedOperator, SurrogateParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const TRIALS: u64 = 20;
const H: f64 = 1e-5;

fn instance(seed: u64, n: usize) -> NormalizedOperator {
    NormalizedOperator::new(&crate::common::random_graph(n, 0.25, true, seed))
}

fn mask(r: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| if r.random::<f64>() < 0.4 { 1.0 } else { 0.0 }).collect()
}

fn random_theta(r: &mut ChaCha8Rng, hidden: usize) -> SurrogateParams {
    let w1 = uniform_vec(r, hidden, -1.5, 1.5);
    let w2 = uniform_vec(r, hidden, -1.5, 1.5);
    let b1 = uniform_vec(r, hidden, -0.5, 0.5);
    let b2 = r.random_range(-0.5..0.5);
    SurrogateParams::new(w1, w2).unwrap().with_biases(b1, b2).unwrap()
}

// Batches span more than one accumulation chunk.
const BATCH: usize = 11;

/// Worst relative error over 20 trials of surrogate parameter gradients.
pub fn surrogate_param_grads() -> f64 {
    let mut worst = 0.0f64;
    for trial in 0..TRIALS {
        let mut r = rng(100 + trial);
        let n = 6;
        let hidden = 4;
        let a = instance(trial, n);
        let theta = random_theta(&mut r, hidden);
        let data: Vec<(Vec<f64>, Vec<f64>)> = (0..BATCH).map(|_| (mask(&mut r, n), mask(&mut r, n))).collect();
        let batch: Vec<(&[f64], &[f64])> = data.iter().map(|(x, y)| (x.as_slice(), y.as_slice())).collect();

        let flatten = |t: &SurrogateParams| {
            let mut flat = t.w1.as_slice().to_vec();
            flat.extend_from_slice(t.w2.as_slice());
            flat.extend_from_slice(&t.b1);
            flat.extend_from_slice(&t.b2);
            flat
        };
        let (_, grads) = loss_and_param_grads(&theta, &a, &batch).unwrap();
        let loss_at = |w: &[f64]| {
            let t = SurrogateParams::new(w[..hidden].to_vec(), w[hidden..2 * hidden].to_vec())
                .unwrap()
                .with_biases(w[2 * hidden..3 * hidden].to_vec(), w[3 * hidden])
                .unwrap();
            loss_and_param_grads(&t, &a, &batch).unwrap().0
        };
        let fd = central_diff(loss_at, &flatten(&theta), H);
        let analytic = flatten(&grads);
        let err = rel_err(&analytic, &fd);
        worst = worst.max(err);
    }
    worst
}

/// Worst relative error of the surrogate input gradient of `b·p̂`.
pub fn surrogate_input_grads() -> f64 {
    let mut worst = 0.0f64;
    for trial in 0..TRIALS {
        let mut r = rng(200 + trial);
        let n = 6;
        let a = instance(trial + 50, n);
        let theta = random_theta(&mut r, 4);
        let x = uniform_vec(&mut r, n, 0.0, 1.0);
        let b = uniform_vec(&mut r, n, 800.0, 1000.0);
        let g = input_gradient(&theta, &a, &x, &b).unwrap();
        let f = |x: &[f64]| predict(&theta, &a, x).unwrap().iter().zip(&b).map(|(p, b)| p * b).sum::<f64>();
        let err = rel_err(&g, &central_diff(f, &x, H));
        worst = worst.max(err);
    }
    worst
}

fn random_ae(r: &mut impl Rng, n: usize, hidden: usize, latent: usize) -> AutoencoderParams {
    let mut phi = AutoencoderParams::zeros(n, hidden, latent);
    for m in [&mut phi.enc_w1, &mut phi.enc_w2, &mut phi.dec_w1, &mut phi.dec_w2] {
        for v in m.as_mut_slice() {
            *v = r.random_range(-1.0..1.0);
        }
    }
    for b in [&mut phi.enc_b1, &mut phi.enc_b2, &mut phi.dec_b1, &mut phi.dec_b2] {
        for v in b.iter_mut() {
            *v = r.random_range(-0.5..0.5);
        }
    }
    phi
}

// Flattened view of every autoencoder tensor, in a fixed order.
fn flatten(phi: &AutoencoderParams) -> Vec<f64> {
    let mut out = Vec::new();
    for m in [&phi.enc_w1, &phi.enc_w2, &phi.dec_w1, &phi.dec_w2] {
        out.extend_from_slice(m.as_slice());
    }
    for b in [&phi.enc_b1, &phi.enc_b2, &phi.dec_b1, &phi.dec_b2] {
        out.extend_from_slice(b);
    }
    out
}

fn unflatten(like: &AutoencoderParams, flat: &[f64]) -> AutoencoderParams {
    let mut phi = like.clone();
    let mut k = 0;
    let mut take = |len: usize| {
        let s = flat[k..k + len].to_vec();
        k += len;
        s
    };
    for m in [&mut phi.enc_w1, &mut phi.enc_w2, &mut phi.dec_w1, &mut phi.dec_w2] {
        let (rows, cols) = m.shape();
        *m = DenseMatrix::from_vec(rows, cols, take(rows * cols)).unwrap();
    }
    for b in [&mut phi.enc_b1, &mut phi.enc_b2, &mut phi.dec_b1, &mut phi.dec_b2] {
        *b = take(b.len());
    }
    phi
}

/// Worst relative error of the reconstruction-loss gradients.
pub fn autoencoder_grads() -> f64 {
    let mut worst = 0.0f64;
    for trial in 0..TRIALS {
        let mut r = rng(300 + trial);
        let (n, hidden, latent) = (8, 4, 3);
        let phi = random_ae(&mut r, n, hidden, latent);
        let data: Vec<Vec<f64>> = (0..BATCH).map(|_| mask(&mut r, n)).collect();
        let batch: Vec<&[f64]> = data.iter().map(Vec::as_slice).collect();
        let (_, grads) = recon_loss_and_grads(&phi, &batch).unwrap();
        let f = |w: &[f64]| recon_loss_and_grads(&unflatten(&phi, w), &batch).unwrap().0;
        let fd = central_diff(f, &flatten(&phi), H);
        let err = rel_err(&flatten(&grads), &fd);
        worst = worst.max(err);
    }
    worst
}

/// Worst relative error of the latent objective gradient, slack and
/// binding budgets alternating.
pub fn latent_objective_grad() -> f64 {
    let mut worst = 0.0f64;
    for trial in 0..TRIALS {
        let mut r = rng(400 + trial);
        let n = 7;
        let a = instance(trial + 90, n);
        let theta = random_theta(&mut r, 3);
        let phi = random_ae(&mut r, n, 4, 3);
        let b = uniform_vec(&mut r, n, 800.0, 1000.0);
        let c = uniform_vec(&mut r, n, 50.0, 100.0);
        let budget = if trial % 2 == 0 { 1e4 } else { 60.0 };
        let obj = LatentObjective {
            theta: &theta,
            phi: &phi,
            a: &a,
            benefit: &b,
            cost: &c,
            budget,
            mu: 25.0,
        };
        let z = uniform_vec(&mut r, 3, -1.0, 1.0);
        let (_, g, _) = obj.value_and_grad(&z).unwrap();
        let fd = central_diff(|z| obj.value(z).unwrap(), &z, H);
        let err = rel_err(&g, &fd);
        worst = worst.max(err);
    }
    worst
}
