//! The symmetric-normalized propagation operator `D^{-1/2} (A + I) D^{-1/2}`
//! over the undirected, unweighted collapse of a graph.

use crate::graph::Graph;

/// Sparse symmetric matrix in compressed-row layout.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedOperator {
    row_offsets: Vec<usize>,
    cols: Vec<u32>,
    values: Vec<f64>,
}

impl NormalizedOperator {
    pub fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let deg: Vec<u64> = (0..n).map(|i| g.degree(i) as u64 + 1).collect();
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(2 * g.undirected_edge_count() + n);
        let mut values = Vec::with_capacity(cols.capacity());
        row_offsets.push(0);
        for i in 0..n {
            let nbrs = g.neighbors(i);
            // keep columns sorted with the diagonal in place
            let split = nbrs.partition_point(|&j| (j as usize) < i);
            let row = nbrs[..split]
                .iter()
                .copied()
                .chain(std::iter::once(i as u32))
                .chain(nbrs[split..].iter().copied());
            for j in row {
                cols.push(j);
                // exact product, one rounding: keeps the matrix bit-symmetric
                values.push(1.0 / ((deg[i] * deg[j as usize]) as f64).sqrt());
            }
            row_offsets.push(cols.len());
        }
        NormalizedOperator {
            row_offsets,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.row_offsets.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries of row `i` as `(column, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (lo..hi).map(move |k| (self.cols[k] as usize, self.values[k]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        match self.cols[lo..hi].binary_search(&(j as u32)) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    /// `y = Â x` for a single column, written into `out`.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                acc += self.values[k] * x[self.cols[k] as usize];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(x, &mut out);
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        m
    }
}
