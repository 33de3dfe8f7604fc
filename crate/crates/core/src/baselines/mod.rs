//! Budget-constrained comparison methods.
//!
//! Every method returns a mask with `c·x <= B`. The Monte Carlo methods
//! optimise profit (benefit of the expected spread minus seed cost) and use
//! common random numbers: all candidates in one decision are scored on the
//! same sampled live-edge worlds.

mod greedy;
mod heuristics;

pub use greedy::{double_greedy, simple_greedy, stochastic_greedy};
pub use heuristics::{
    clustering_coefficients, degree_discount, degree_discount_score, high_clustering, high_degree, random_selection,
    single_discount,
};

use serde::{Deserialize, Serialize};

use crate::diffusion::SeedMask;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::weights::{CostBenefit, EdgeProbabilities};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    /// Live-edge worlds per marginal-gain estimate.
    pub rollouts: usize,
    /// Candidate sample fraction for stochastic greedy.
    pub epsilon: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            rollouts: 200,
            epsilon: 0.1,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rollouts == 0 {
            return Err(Error::Invalid("baseline rollouts must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::Invalid(format!("stochastic greedy epsilon {} outside (0, 1]", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Baseline {
    SimpleGreedy,
    StochasticGreedy,
    DoubleGreedy,
    HighDegree,
    SingleDiscount,
    DegreeDiscount,
    HighClustering,
    Random,
}

impl Baseline {
    pub const ALL: [Baseline; 8] = [
        Baseline::SimpleGreedy,
        Baseline::StochasticGreedy,
        Baseline::DoubleGreedy,
        Baseline::HighDegree,
        Baseline::SingleDiscount,
        Baseline::DegreeDiscount,
        Baseline::HighClustering,
        Baseline::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::SimpleGreedy => "SG",
            Baseline::StochasticGreedy => "StG",
            Baseline::DoubleGreedy => "DG",
            Baseline::HighDegree => "HD",
            Baseline::SingleDiscount => "SD",
            Baseline::DegreeDiscount => "DD",
            Baseline::HighClustering => "HC",
            Baseline::Random => "Random",
        }
    }

    pub fn run(
        self,
        g: &Graph,
        p: &EdgeProbabilities,
        cb: &CostBenefit,
        budget: f64,
        cfg: &BaselineConfig,
        seed: u64,
    ) -> Result<SeedMask> {
        cfg.validate()?;
        Ok(match self {
            Baseline::SimpleGreedy => simple_greedy(g, p, cb, budget, cfg, seed),
            Baseline::StochasticGreedy => stochastic_greedy(g, p, cb, budget, cfg, seed),
            Baseline::DoubleGreedy => double_greedy(g, p, cb, budget, cfg, seed),
            Baseline::HighDegree => high_degree(g, cb, budget),
            Baseline::SingleDiscount => single_discount(g, cb, budget),
            Baseline::DegreeDiscount => degree_discount(g, cb, budget, p.mean()),
            Baseline::HighClustering => high_clustering(g, cb, budget),
            Baseline::Random => random_selection(g, cb, budget, seed),
        })
    }
}
