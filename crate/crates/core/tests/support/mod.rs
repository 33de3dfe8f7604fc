//! Trained-model fixtures built through the public pipeline.
#![allow(dead_code)]

use crate::common::{random_graph, rng, subsets, uniform_vec};
use deeppm_core::inference::surrogate_profit;
use deeppm_core::{
    generate_training_set, select_seeds, train, Checkpoint, CostBenefit, EdgeProbabilities, Graph, InferenceConfig,
    NormalizedOperator, SurrogateParams, TrainConfig, TrainedModel,
};

pub fn quick_train_config(epochs: usize) -> TrainConfig {
    TrainConfig {
        masks: 80,
        labels_per_mask: 4,
        epochs,
        batch_size: 32,
        hidden: 8,
        ae_hidden: 16,
        latent: 4,
        ..TrainConfig::default()
    }
}

pub fn trained(g: &Graph, p: &EdgeProbabilities, cb: &CostBenefit, budget: f64, cfg: &TrainConfig, seed: u64) -> (NormalizedOperator, TrainedModel) {
    let a = NormalizedOperator::new(g);
    let samples = generate_training_set(g, p, cb, budget, cfg, seed).unwrap();
    let model = train(&a, &samples, cfg, seed).unwrap();
    (a, model)
}

/// Star with hub 0 and `leaves` leaves, arcs in both directions.
pub fn star(leaves: usize) -> Graph {
    let e: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    Graph::from_edges(leaves + 1, &e, false).unwrap()
}

/// Best surrogate profit over all feasible subsets.
pub fn brute_force(theta: &SurrogateParams, a: &NormalizedOperator, b: &[f64], c: &[f64], budget: f64) -> f64 {
    let n = b.len();
    subsets(n)
        .filter(|s| s.iter().map(|&i| c[i]).sum::<f64>() <= budget)
        .map(|s| {
            let mut x = vec![0.0; n];
            for i in s {
                x[i] = 1.0;
            }
            surrogate_profit(theta, a, &x, b, c).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Rounded-to-optimal surrogate profit ratio on 20 trained six-node fixtures.
pub fn rounding_ratios() -> Vec<f64> {
    (0..20u64)
        .map(|k| {
            let g = random_graph(6, 0.15, true, 100 + k);
            let p = EdgeProbabilities::constant(&g, 0.3).unwrap();
            let mut r = rng(200 + k);
            let cb = CostBenefit::new(uniform_vec(&mut r, 6, 50.0, 100.0), uniform_vec(&mut r, 6, 800.0, 1000.0)).unwrap();
            let budget = 200.0;
            let (a, m) = trained(&g, &p, &cb, budget, &quick_train_config(60), k);
            let ckpt = Checkpoint::new(m.theta.clone(), m.phi.clone(), budget, k, String::new());
            let (mask, diag) = select_seeds(&g, &cb, budget, &ckpt, &InferenceConfig::default(), k).unwrap();
            assert!(mask.cost(&cb.cost) <= budget);
            diag.surrogate_profit / brute_force(&m.theta, &a, &cb.benefit, &cb.cost, budget)
        })
        .collect()
}
