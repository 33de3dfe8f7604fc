//! Budget-constrained profit maximization on social networks.
//!
//! The pipeline: a Monte Carlo Independent Cascade simulator ([`diffusion`])
//! labels random budget-feasible seed masks; a two-layer GCN
//! ([`surrogate`]) learns activation probabilities from those labels while an
//! autoencoder ([`autoencoder`]) learns a latent description of seed masks
//! ([`trainer`]). Selection ([`inference`]) climbs the surrogate profit in the
//! decoder's latent space and rounds greedily to a feasible seed set.
//! [`baselines`] holds the comparison methods and [`harness`] the experiment
//! driver behind the CLI.

pub mod autoencoder;
pub mod baselines;
pub mod checkpoint;
pub mod diffusion;
pub mod error;
pub mod graph;
pub mod harness;
pub mod inference;
pub mod numerics;
pub mod operator;
pub mod rng;
pub mod surrogate;
pub mod synthetic;
pub mod trainer;
pub mod weights;

pub use baselines::{Baseline, BaselineConfig};
pub use checkpoint::Checkpoint;
pub use diffusion::{
    estimate_activation, evaluate_profit, rollout, rollout_in_world, sample_world, ActivationMask, LiveEdgeWorld,
    ProfitEstimate, SeedMask,
};
pub use error::{Error, Result};
pub use graph::{load_edge_list, Graph, GraphStats};
pub use inference::{ascent_runs, greedy_round, latent_ascent, select_seeds, InferenceConfig, LatentObjective, SelectionDiagnostics};
pub use numerics::{AdamConfig, DenseMatrix};
pub use operator::NormalizedOperator;
pub use surrogate::SurrogateParams;
pub use autoencoder::AutoencoderParams;
pub use trainer::{generate_training_set, train, TrainConfig, TrainedModel, TrainingSample};
pub use weights::{assign_cost_benefit, assign_probabilities, CostBenefit, EdgeProbabilities, Interval, ProbabilityModel};
