//! Two-layer GCN student mapping a seed mask to per-node activation
//! probabilities:
//!
//! ```text
//! H1 = ReLU((Â X) W1 + 1 b1)   X: |V|×1, W1: 1×H, b1: H
//! p̂  = σ((Â H1) W2 + b2)       W2: H×1, b2: scalar
//! ```
//!
//! With zero biases this is the plain two-layer GCN. Without them the
//! model degenerates: `Â x ≥ 0`, so `ReLU((Â x) W1) W2 = α (Â x)` for a
//! single scalar `α` and every node far from the seeds is stuck at 0.5.
//! Training may hold the biases at zero (see `TrainConfig::surrogate_bias`).
//!
//! Gradients are derived by hand. `Â H1 W2 = Â (H1 W2)`, so the second
//! propagation is a single sparse matvec.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error, Result};
use crate::numerics::{bce_sum, chunked_sum, sigmoid, DenseMatrix};
use crate::operator::NormalizedOperator;
use crate::rng;

pub const DEFAULT_HIDDEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateParams {
    /// 1×H
    pub w1: DenseMatrix,
    /// H×1
    pub w2: DenseMatrix,
    /// H
    pub b1: Vec<f64>,
    /// length 1
    pub b2: Vec<f64>,
}

/// Gradients with the same layout as [`SurrogateParams`].
pub type SurrogateGrads = SurrogateParams;

/// Glorot-uniform sample of `len` values for a layer with the given fans.
pub(crate) fn glorot(rng: &mut rng::Rng, len: usize, fan_in: usize, fan_out: usize) -> Vec<f64> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..len).map(|_| rng.random_range(-limit..=limit)).collect()
}

impl SurrogateParams {
    pub fn new(w1: Vec<f64>, w2: Vec<f64>) -> Result<Self> {
        if w1.len() != w2.len() || w1.is_empty() {
            return Err(shape_err("W1 and W2 of equal nonzero width".to_string(), format!("{} and {}", w1.len(), w2.len())));
        }
        let h = w1.len();
        Ok(SurrogateParams {
            w1: DenseMatrix::from_vec(1, h, w1)?,
            w2: DenseMatrix::from_vec(h, 1, w2)?,
            b1: vec![0.0; h],
            b2: vec![0.0],
        })
    }

    pub fn with_biases(mut self, b1: Vec<f64>, b2: f64) -> Result<Self> {
        if b1.len() != self.hidden() {
            return Err(shape_err(self.hidden(), b1.len()));
        }
        self.b1 = b1;
        self.b2 = vec![b2];
        Ok(self)
    }

    pub fn zeros(hidden: usize) -> Self {
        SurrogateParams {
            w1: DenseMatrix::zeros(1, hidden),
            w2: DenseMatrix::zeros(hidden, 1),
            b1: vec![0.0; hidden],
            b2: vec![0.0],
        }
    }

    pub fn init(hidden: usize, seed: u64) -> Result<Self> {
        if hidden == 0 {
            return Err(Error::Invalid("hidden width must be at least 1".into()));
        }
        let mut r = rng::seeded(seed);
        let w1 = glorot(&mut r, hidden, 1, hidden);
        let w2 = glorot(&mut r, hidden, hidden, 1);
        Self::new(w1, w2)
    }

    pub fn hidden(&self) -> usize {
        self.w1.cols()
    }

    pub fn is_finite(&self) -> bool {
        self.w1.is_finite() && self.w2.is_finite() && self.b1.iter().chain(&self.b2).all(|v| v.is_finite())
    }

    /// Shapes agree with the hidden width.
    pub fn is_consistent(&self) -> bool {
        let h = self.hidden();
        self.w1.rows() == 1 && self.w2.shape() == (h, 1) && self.b1.len() == h && self.b2.len() == 1
    }

    /// `[W1, W2, b1, b2]`
    pub(crate) fn tensors_mut(&mut self) -> [&mut [f64]; 4] {
        [self.w1.as_mut_slice(), self.w2.as_mut_slice(), &mut self.b1, &mut self.b2]
    }

    pub(crate) fn tensors(&self) -> [&[f64]; 4] {
        [self.w1.as_slice(), self.w2.as_slice(), &self.b1, &self.b2]
    }
}

/// Intermediates of a forward pass, kept for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// `Â x`
    ax: Vec<f64>,
    /// `(Â x) W1 + b1`, |V|×H, pre-activation
    pre: DenseMatrix,
    /// `p̂`
    pub probs: Vec<f64>,
}

/// Multiply-adds of one forward pass; linear in the operator's nonzeros.
pub fn forward_op_count(a: &NormalizedOperator, hidden: usize) -> usize {
    2 * a.nnz() + 2 * a.dim() * hidden
}

pub fn forward(theta: &SurrogateParams, a: &NormalizedOperator, x: &[f64]) -> Result<ForwardCache> {
    let n = a.dim();
    if x.len() != n {
        return Err(shape_err(n, x.len()));
    }
    let h = theta.hidden();
    let w1 = theta.w1.as_slice();
    let w2 = theta.w2.as_slice();
    let ax = a.apply(x);
    let pre = DenseMatrix::from_fn(n, h, |i, k| ax[i] * w1[k] + theta.b1[k]);
    let u: Vec<f64> = (0..n)
        .map(|i| pre.row(i).iter().zip(w2).map(|(&z, &w)| z.max(0.0) * w).sum())
        .collect();
    let b2 = theta.b2[0];
    let probs = a.apply(&u).into_iter().map(|t| sigmoid(t + b2)).collect();
    Ok(ForwardCache { ax, pre, probs })
}

/// Predicted activation probabilities only.
pub fn predict(theta: &SurrogateParams, a: &NormalizedOperator, x: &[f64]) -> Result<Vec<f64>> {
    forward(theta, a, x).map(|c| c.probs)
}

// Backpropagates a gradient w.r.t. the output logits, accumulating
// parameter gradients into `grads`; returns the gradient w.r.t. `Â x`.
fn backward_into(
    theta: &SurrogateParams,
    a: &NormalizedOperator,
    cache: &ForwardCache,
    g_logits: &[f64],
    grads: &mut SurrogateGrads,
) -> Vec<f64> {
    let n = a.dim();
    let w1 = theta.w1.as_slice();
    let w2 = theta.w2.as_slice();
    // Â is symmetric, so Â^T g = Â g
    let g_u = a.apply(g_logits);
    let mut g_ax = vec![0.0; n];
    {
        let [gw1, gw2, gb1, gb2] = grads.tensors_mut();
        gb2[0] += g_logits.iter().sum::<f64>();
        for i in 0..n {
            let gu = g_u[i];
            if gu == 0.0 {
                continue;
            }
            let mut acc = 0.0;
            for (k, &z) in cache.pre.row(i).iter().enumerate() {
                if z > 0.0 {
                    gw2[k] += z * gu;
                    let g_pre = gu * w2[k];
                    gw1[k] += cache.ax[i] * g_pre;
                    gb1[k] += g_pre;
                    acc += g_pre * w1[k];
                }
            }
            g_ax[i] = acc;
        }
    }
    g_ax
}

fn add_into(acc: &mut SurrogateGrads, part: &SurrogateGrads) {
    for (t, p) in acc.tensors_mut().into_iter().zip(part.tensors()) {
        t.iter_mut().zip(p).for_each(|(a, b)| *a += b);
    }
}

/// Mean BCE of the surrogate against teacher labels over all samples and
/// nodes, with its gradient w.r.t. every parameter.
pub fn loss_and_param_grads(
    theta: &SurrogateParams,
    a: &NormalizedOperator,
    batch: &[(&[f64], &[f64])],
) -> Result<(f64, SurrogateGrads)> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let n = a.dim();
    let norm = (batch.len() * n) as f64;
    let (total, grads) = chunked_sum(
        batch.len(),
        || (0.0, SurrogateParams::zeros(theta.hidden())),
        |(loss, grads), k| {
            let (x, y) = batch[k];
            if y.len() != n {
                return Err(shape_err(n, y.len()));
            }
            let cache = forward(theta, a, x)?;
            *loss += bce_sum(&cache.probs, y)?;
            let g_logits: Vec<f64> = cache.probs.iter().zip(y).map(|(p, y)| (p - y) / norm).collect();
            backward_into(theta, a, &cache, &g_logits, grads);
            Ok(())
        },
        |(l, g), (lp, gp)| {
            *l += lp;
            add_into(g, gp);
        },
    )?;
    Ok((total / norm, grads))
}

/// `∇_x (b^T p̂(x))`, computed as a vector-Jacobian product.
pub fn input_gradient(theta: &SurrogateParams, a: &NormalizedOperator, x: &[f64], benefit: &[f64]) -> Result<Vec<f64>> {
    let cache = forward(theta, a, x)?;
    input_gradient_from_cache(theta, a, &cache, benefit)
}

pub(crate) fn input_gradient_from_cache(
    theta: &SurrogateParams,
    a: &NormalizedOperator,
    cache: &ForwardCache,
    benefit: &[f64],
) -> Result<Vec<f64>> {
    if benefit.len() != a.dim() {
        return Err(shape_err(a.dim(), benefit.len()));
    }
    let g_logits: Vec<f64> = cache.probs.iter().zip(benefit).map(|(p, b)| b * p * (1.0 - p)).collect();
    let mut scratch = SurrogateParams::zeros(theta.hidden());
    let g_ax = backward_into(theta, a, cache, &g_logits, &mut scratch);
    Ok(a.apply(&g_ax))
}
