//! Small dense linear algebra, activations, BCE, and Adam.
//!
//! Reductions run sequentially in index order so results are reproducible
//! bit-for-bit across runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Result};
use crate::operator::NormalizedOperator;

/// Clamp used to keep probabilities away from 0 and 1 before taking logs.
pub const EPS_CLAMP: f64 = 1e-7;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape_err(format!("{rows}x{cols}"), format!("{} values", data.len())));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self * x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(shape_err(self.cols, x.len()));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `self^T * y`.
    pub fn matvec_t(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(shape_err(self.rows, y.len()));
        }
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        Ok(out)
    }

    /// Accumulates the outer product `alpha * u v^T` into `self`.
    pub fn add_outer(&mut self, alpha: f64, u: &[f64], v: &[f64]) {
        debug_assert_eq!(u.len(), self.rows);
        debug_assert_eq!(v.len(), self.cols);
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0.0 {
                continue;
            }
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            for (r, &vj) in row.iter_mut().zip(v) {
                *r += alpha * ui * vj;
            }
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// Samples per accumulation chunk in `chunked_sum`.
const SUM_CHUNK: usize = 8;

/// Sums per-sample contributions in parallel. Samples are grouped into
/// fixed chunks that accumulate sequentially and chunk totals are merged in
/// order, so the floating-point result does not depend on the thread count.
pub(crate) fn chunked_sum<T: Send>(
    len: usize,
    init: impl Fn() -> T + Sync,
    add: impl Fn(&mut T, usize) -> Result<()> + Sync,
    merge: impl Fn(&mut T, &T),
) -> Result<T> {
    let starts: Vec<usize> = (0..len).step_by(SUM_CHUNK).collect();
    let parts: Vec<T> = starts
        .par_iter()
        .map(|&lo| {
            let mut acc = init();
            for i in lo..(lo + SUM_CHUNK).min(len) {
                add(&mut acc, i)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut parts = parts.into_iter();
    let mut total = parts.next().unwrap_or_else(&init);
    for p in parts {
        merge(&mut total, &p);
    }
    Ok(total)
}

/// Sparse-dense product `Â H`, column by column.
pub fn spmv(a: &NormalizedOperator, h: &DenseMatrix) -> Result<DenseMatrix> {
    if h.rows() != a.dim() {
        return Err(shape_err(format!("{} rows", a.dim()), format!("{} rows", h.rows())));
    }
    let mut out = DenseMatrix::zeros(h.rows(), h.cols());
    for i in 0..a.dim() {
        for (j, v) in a.row(i) {
            for f in 0..h.cols() {
                out.data[i * h.cols + f] += v * h.get(j, f);
            }
        }
    }
    Ok(out)
}

#[inline]
pub fn relu(t: f64) -> f64 {
    t.max(0.0)
}

/// Logistic function, clamped to `[EPS_CLAMP, 1 - EPS_CLAMP]`.
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    let s = if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    };
    s.clamp(EPS_CLAMP, 1.0 - EPS_CLAMP)
}

pub fn relu_vec(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&t| relu(t)).collect()
}

pub fn sigmoid_vec(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&t| sigmoid(t)).collect()
}

/// Elementwise binary cross-entropy, summed (not averaged).
pub fn bce_sum(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(shape_err(pred.len(), target.len()));
    }
    Ok(pred
        .iter()
        .zip(target)
        .map(|(&p, &y)| {
            let p = p.clamp(EPS_CLAMP, 1.0 - EPS_CLAMP);
            -y * p.ln() - (1.0 - y) * (1.0 - p).ln()
        })
        .sum())
}

/// Mean binary cross-entropy with `pred` clamped to `[EPS_CLAMP, 1 - EPS_CLAMP]`.
pub fn bce(pred: &[f64], target: &[f64]) -> Result<f64> {
    let total = bce_sum(pred, target)?;
    Ok(if pred.is_empty() { 0.0 } else { total / pred.len() as f64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-2,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment accumulators for one parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(len: usize, config: AdamConfig) -> Self {
        AdamState {
            config,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState) -> Result<()> {
    if params.len() != grads.len() {
        return Err(shape_err(params.len(), grads.len()));
    }
    if params.len() != state.m.len() {
        return Err(shape_err(state.m.len(), params.len()));
    }
    let AdamConfig {
        learning_rate,
        beta1,
        beta2,
        epsilon,
    } = state.config;
    state.t += 1;
    let bc1 = 1.0 - beta1.powi(state.t as i32);
    let bc2 = 1.0 - beta2.powi(state.t as i32);
    for (((p, &g), m), v) in params.iter_mut().zip(grads).zip(&mut state.m).zip(&mut state.v) {
        *m = beta1 * *m + (1.0 - beta1) * g;
        *v = beta2 * *v + (1.0 - beta2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn spmv_cases() {
        let one = NormalizedOperator::new(&Graph::from_edges(1, &[], true).unwrap());
        let h = DenseMatrix::from_vec(1, 2, vec![3.0, -1.0]).unwrap();
        assert_eq!(spmv(&one, &h).unwrap(), h);

        let two = NormalizedOperator::new(&Graph::from_edges(2, &[(0, 1)], true).unwrap());
        let x = DenseMatrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap();
        assert_eq!(spmv(&two, &x).unwrap().as_slice(), &[0.5, 0.5]);
        let z = DenseMatrix::zeros(2, 3);
        assert_eq!(spmv(&two, &z).unwrap(), z);
        assert!(spmv(&two, &DenseMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn bce_values() {
        let v = bce(&[0.5, 0.5, 0.5], &[1.0, 0.0, 1.0]).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
        let v = bce(&[0.9, 0.1], &[1.0, 0.0]).unwrap();
        assert!((v - (-(0.9f64.ln() + 0.9f64.ln()) / 2.0)).abs() < 1e-15);
        for (p, y) in [(0.0, 1.0), (1.0, 0.0), (0.0, 0.0), (1.0, 1.0)] {
            assert!(bce(&[p], &[y]).unwrap().is_finite());
        }
        assert!(bce(&[0.5], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn bce_minimized_at_target() {
        for &target in &[0.0, 0.2, 0.5, 0.7, 1.0] {
            let best = (1..1000)
                .map(|k| k as f64 / 1000.0)
                .min_by(|a, b| bce(&[*a], &[target]).unwrap().total_cmp(&bce(&[*b], &[target]).unwrap()))
                .unwrap();
            let expect = target.clamp(0.001, 0.999);
            assert!((best - expect).abs() < 1e-9, "target {target}: grid min at {best}");
        }
    }

    #[test]
    fn activations() {
        assert_eq!(relu_vec(&[-1.0, 0.0, 2.0]), vec![0.0, 0.0, 2.0]);
        assert_eq!(sigmoid(0.0), 0.5);
        let t = 3.7;
        assert!((sigmoid(-t) - (1.0 - sigmoid(t))).abs() < 1e-15);
        assert!(sigmoid(1e3) < 1.0 && sigmoid(-1e3) > 0.0);
    }

    #[test]
    fn adam_zero_gradient_fixed_point() {
        let mut p = vec![0.3, -1.2];
        let mut st = AdamState::new(2, AdamConfig::default());
        for _ in 0..5 {
            adam_step(&mut p, &[0.0, 0.0], &mut st).unwrap();
        }
        assert_eq!(p, vec![0.3, -1.2]);
        assert_eq!(st.steps(), 5);
    }

    #[test]
    fn adam_first_step_is_lr_sign() {
        let cfg = AdamConfig::default();
        for g in [2.5, -0.01] {
            let mut p = vec![1.0];
            let mut st = AdamState::new(1, cfg);
            adam_step(&mut p, &[g], &mut st).unwrap();
            let expect = cfg.learning_rate * g / ((g * g).sqrt() + cfg.epsilon);
            assert!(((1.0 - p[0]) - expect).abs() < 1e-15);
            assert!(((1.0 - p[0]).abs() - cfg.learning_rate).abs() < 1e-6);
        }
    }

    #[test]
    fn adam_deterministic_and_shape_checked() {
        let mut a = vec![1.0, 2.0];
        let mut b = a.clone();
        let mut sa = AdamState::new(2, AdamConfig::default());
        let mut sb = sa.clone();
        adam_step(&mut a, &[0.4, -0.2], &mut sa).unwrap();
        adam_step(&mut b, &[0.4, -0.2], &mut sb).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
        assert!(adam_step(&mut a, &[0.1], &mut sa).is_err());
    }

    #[test]
    fn matvec_and_transpose() {
        let m = DenseMatrix::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m.matvec(&[1.0, 0.0, -1.0]).unwrap(), vec![-2.0, -2.0]);
        assert_eq!(m.matvec_t(&[1.0, 1.0]).unwrap(), vec![5.0, 7.0, 9.0]);
    }
}
