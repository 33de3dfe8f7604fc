//! Seed-mask autoencoder. Encoder `|V| → H (ReLU) → Z` with a linear latent;
//! decoder `Z → H (ReLU) → |V|` logits followed by a sigmoid.

use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error, Result};
use crate::numerics::{bce_sum, chunked_sum, dot, sigmoid, DenseMatrix};
use crate::rng;
use crate::surrogate::glorot;

pub const DEFAULT_HIDDEN: usize = 64;
pub const DEFAULT_LATENT: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoencoderParams {
    pub enc_w1: DenseMatrix,
    pub enc_b1: Vec<f64>,
    pub enc_w2: DenseMatrix,
    pub enc_b2: Vec<f64>,
    pub dec_w1: DenseMatrix,
    pub dec_b1: Vec<f64>,
    pub dec_w2: DenseMatrix,
    pub dec_b2: Vec<f64>,
}

pub type AutoencoderGrads = AutoencoderParams;

impl AutoencoderParams {
    pub fn zeros(nodes: usize, hidden: usize, latent: usize) -> Self {
        AutoencoderParams {
            enc_w1: DenseMatrix::zeros(hidden, nodes),
            enc_b1: vec![0.0; hidden],
            enc_w2: DenseMatrix::zeros(latent, hidden),
            enc_b2: vec![0.0; latent],
            dec_w1: DenseMatrix::zeros(hidden, latent),
            dec_b1: vec![0.0; hidden],
            dec_w2: DenseMatrix::zeros(nodes, hidden),
            dec_b2: vec![0.0; nodes],
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init(nodes: usize, hidden: usize, latent: usize, seed: u64) -> Result<Self> {
        if nodes == 0 || hidden == 0 || latent == 0 {
            return Err(Error::Invalid("autoencoder dimensions must be at least 1".into()));
        }
        let mut r = rng::seeded(seed);
        let mut p = Self::zeros(nodes, hidden, latent);
        for (m, fi, fo) in [
            (&mut p.enc_w1, nodes, hidden),
            (&mut p.enc_w2, hidden, latent),
            (&mut p.dec_w1, latent, hidden),
            (&mut p.dec_w2, hidden, nodes),
        ] {
            let len = m.as_slice().len();
            m.as_mut_slice().copy_from_slice(&glorot(&mut r, len, fi, fo));
        }
        Ok(p)
    }

    pub fn nodes(&self) -> usize {
        self.enc_w1.cols()
    }

    pub fn hidden(&self) -> usize {
        self.enc_w1.rows()
    }

    pub fn latent(&self) -> usize {
        self.enc_w2.rows()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub(crate) fn tensors(&self) -> [&[f64]; 8] {
        [
            self.enc_w1.as_slice(),
            &self.enc_b1,
            self.enc_w2.as_slice(),
            &self.enc_b2,
            self.dec_w1.as_slice(),
            &self.dec_b1,
            self.dec_w2.as_slice(),
            &self.dec_b2,
        ]
    }

    pub(crate) fn tensors_mut(&mut self) -> [&mut [f64]; 8] {
        [
            self.enc_w1.as_mut_slice(),
            &mut self.enc_b1,
            self.enc_w2.as_mut_slice(),
            &mut self.enc_b2,
            self.dec_w1.as_mut_slice(),
            &mut self.dec_b1,
            self.dec_w2.as_mut_slice(),
            &mut self.dec_b2,
        ]
    }

    fn zeros_like(&self) -> Self {
        Self::zeros(self.nodes(), self.hidden(), self.latent())
    }
}

fn affine(w: &DenseMatrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    (0..w.rows()).map(|i| dot(w.row(i), x) + b[i]).collect()
}

// Seed masks are mostly zeros, so the first encoder layer only touches the
// nonzero columns of `x`. Skipped terms are exact zeros.
fn nonzeros(x: &[f64]) -> Vec<(usize, f64)> {
    x.iter().copied().enumerate().filter(|&(_, v)| v != 0.0).collect()
}

fn affine_sparse(w: &DenseMatrix, b: &[f64], nz: &[(usize, f64)]) -> Vec<f64> {
    (0..w.rows())
        .map(|i| {
            let row = w.row(i);
            nz.iter().map(|&(j, v)| row[j] * v).sum::<f64>() + b[i]
        })
        .collect()
}

struct EncodeCache {
    pre: Vec<f64>,
    z: Vec<f64>,
}

/// Decoder intermediates for backpropagation.
#[derive(Debug, Clone)]
pub struct DecodeCache {
    pre: Vec<f64>,
    /// `σ(dec(z))`
    pub out: Vec<f64>,
}

fn encode_cached(phi: &AutoencoderParams, x: &[f64]) -> Result<EncodeCache> {
    if x.len() != phi.nodes() {
        return Err(shape_err(phi.nodes(), x.len()));
    }
    let pre = affine_sparse(&phi.enc_w1, &phi.enc_b1, &nonzeros(x));
    let h: Vec<f64> = pre.iter().map(|v| v.max(0.0)).collect();
    let z = affine(&phi.enc_w2, &phi.enc_b2, &h);
    Ok(EncodeCache { pre, z })
}

pub fn encode(phi: &AutoencoderParams, x: &[f64]) -> Result<Vec<f64>> {
    encode_cached(phi, x).map(|c| c.z)
}

pub fn decode_cached(phi: &AutoencoderParams, z: &[f64]) -> Result<DecodeCache> {
    if z.len() != phi.latent() {
        return Err(shape_err(phi.latent(), z.len()));
    }
    let pre = affine(&phi.dec_w1, &phi.dec_b1, z);
    let h: Vec<f64> = pre.iter().map(|v| v.max(0.0)).collect();
    let out = affine(&phi.dec_w2, &phi.dec_b2, &h).into_iter().map(sigmoid).collect();
    Ok(DecodeCache { pre, out })
}

/// `σ(dec(z))`, strictly inside `(0, 1)`.
pub fn decode(phi: &AutoencoderParams, z: &[f64]) -> Result<Vec<f64>> {
    decode_cached(phi, z).map(|c| c.out)
}

// Backprop through the decoder from a gradient on its output logits.
// Accumulates parameter grads into `grads` (if given) and returns dL/dz.
fn decode_backward(
    phi: &AutoencoderParams,
    z: &[f64],
    cache: &DecodeCache,
    g_logits: &[f64],
    grads: Option<&mut AutoencoderGrads>,
) -> Vec<f64> {
    let h: Vec<f64> = cache.pre.iter().map(|v| v.max(0.0)).collect();
    let g_h = phi.dec_w2.matvec_t(g_logits).expect("decoder shapes");
    let g_pre: Vec<f64> = g_h
        .iter()
        .zip(&cache.pre)
        .map(|(g, &p)| if p > 0.0 { *g } else { 0.0 })
        .collect();
    if let Some(grads) = grads {
        grads.dec_w2.add_outer(1.0, g_logits, &h);
        grads.dec_b2.iter_mut().zip(g_logits).for_each(|(a, g)| *a += g);
        grads.dec_w1.add_outer(1.0, &g_pre, z);
        grads.dec_b1.iter_mut().zip(&g_pre).for_each(|(a, g)| *a += g);
    }
    phi.dec_w1.matvec_t(&g_pre).expect("decoder shapes")
}

/// Vector-Jacobian product of `σ(dec(z))` with `g_out`: returns
/// `J^T g_out` for the Jacobian w.r.t. `z`.
pub fn decode_vjp(phi: &AutoencoderParams, z: &[f64], cache: &DecodeCache, g_out: &[f64]) -> Vec<f64> {
    let g_logits: Vec<f64> = cache.out.iter().zip(g_out).map(|(s, g)| g * s * (1.0 - s)).collect();
    decode_backward(phi, z, cache, &g_logits, None)
}

/// Mean reconstruction BCE over the batch and all nodes, with gradients for
/// every encoder and decoder tensor.
pub fn recon_loss_and_grads(phi: &AutoencoderParams, batch: &[&[f64]]) -> Result<(f64, AutoencoderGrads)> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let norm = (batch.len() * phi.nodes()) as f64;
    let (total, grads) = chunked_sum(
        batch.len(),
        || (0.0, phi.zeros_like()),
        |(loss, grads), k| {
            let x = batch[k];
            let enc = encode_cached(phi, x)?;
            let dec = decode_cached(phi, &enc.z)?;
            *loss += bce_sum(&dec.out, x)?;
            let g_logits: Vec<f64> = dec.out.iter().zip(x).map(|(p, t)| (p - t) / norm).collect();
            let g_z = decode_backward(phi, &enc.z, &dec, &g_logits, Some(grads));

            let h: Vec<f64> = enc.pre.iter().map(|v| v.max(0.0)).collect();
            grads.enc_w2.add_outer(1.0, &g_z, &h);
            grads.enc_b2.iter_mut().zip(&g_z).for_each(|(a, g)| *a += g);
            let g_h = phi.enc_w2.matvec_t(&g_z)?;
            let g_pre: Vec<f64> = g_h
                .iter()
                .zip(&enc.pre)
                .map(|(g, &p)| if p > 0.0 { *g } else { 0.0 })
                .collect();
            let nz = nonzeros(x);
            let cols = grads.enc_w1.cols();
            let gw1 = grads.enc_w1.as_mut_slice();
            for (i, &g) in g_pre.iter().enumerate() {
                if g == 0.0 {
                    continue;
                }
                let row = &mut gw1[i * cols..(i + 1) * cols];
                for &(j, v) in &nz {
                    row[j] += g * v;
                }
            }
            grads.enc_b1.iter_mut().zip(&g_pre).for_each(|(a, g)| *a += g);
            Ok(())
        },
        |(l, g), (lp, gp)| {
            *l += lp;
            for (acc, part) in g.tensors_mut().into_iter().zip(gp.tensors()) {
                acc.iter_mut().zip(part).for_each(|(a, b)| *a += b);
            }
        },
    )?;
    Ok((total / norm, grads))
}
