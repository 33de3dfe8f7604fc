//! Edge transmission probabilities and node costs/benefits.

use rand::seq::IndexedRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

pub const TRIVALENCY_LEVELS: [f64; 3] = [0.1, 0.01, 0.001];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbabilityModel {
    /// Every arc gets the same probability.
    Uniform(f64),
    /// Each arc independently draws one of [`TRIVALENCY_LEVELS`].
    Trivalency,
}

impl ProbabilityModel {
    pub fn name(&self) -> &'static str {
        match self {
            ProbabilityModel::Uniform(_) => "uniform",
            ProbabilityModel::Trivalency => "trivalency",
        }
    }
}

/// Per-arc transmission probability, indexed by arc id.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProbabilities(Vec<f64>);

impl EdgeProbabilities {
    /// Wraps explicit per-arc values. Values must lie in `[0, 1]`; zero is
    /// accepted so that diffusion-free fixtures can be expressed.
    pub fn from_values(g: &Graph, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.arc_count() {
            return Err(crate::error::shape_err(g.arc_count(), values.len()));
        }
        if let Some(p) = values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Invalid(format!("edge probability {p} outside [0, 1]")));
        }
        Ok(EdgeProbabilities(values))
    }

    pub fn constant(g: &Graph, p: f64) -> Result<Self> {
        Self::from_values(g, vec![p; g.arc_count()])
    }

    #[inline]
    pub fn get(&self, arc: usize) -> f64 {
        self.0[arc]
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn mean(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else {
            self.0.iter().sum::<f64>() / self.0.len() as f64
        }
    }
}

pub fn assign_probabilities(g: &Graph, model: ProbabilityModel, seed: u64) -> Result<EdgeProbabilities> {
    match model {
        ProbabilityModel::Uniform(p) => {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Invalid(format!("uniform probability {p} outside (0, 1]")));
            }
            Ok(EdgeProbabilities(vec![p; g.arc_count()]))
        }
        ProbabilityModel::Trivalency => {
            let mut rng = rng::seeded(seed);
            let values = (0..g.arc_count())
                .map(|_| *TRIVALENCY_LEVELS.choose(&mut rng).expect("nonempty"))
                .collect();
            Ok(EdgeProbabilities(values))
        }
    }
}

/// Closed interval `[lo, hi]` used for cost and benefit sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const DEFAULT_COST: Interval = Interval { lo: 50.0, hi: 100.0 };
    pub const DEFAULT_BENEFIT: Interval = Interval { lo: 800.0, hi: 1000.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.lo > 0.0 && self.lo <= self.hi && self.hi.is_finite()) {
            return Err(Error::Invalid(format!(
                "{what} range [{}, {}] must be positive with min <= max",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// Node selection costs and benefits.
#[derive(Debug, Clone, PartialEq)]
pub struct CostBenefit {
    pub cost: Vec<f64>,
    pub benefit: Vec<f64>,
}

impl CostBenefit {
    pub fn new(cost: Vec<f64>, benefit: Vec<f64>) -> Result<Self> {
        if cost.len() != benefit.len() {
            return Err(crate::error::shape_err(cost.len(), benefit.len()));
        }
        if cost.iter().chain(&benefit).any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Invalid("costs and benefits must be positive and finite".into()));
        }
        Ok(CostBenefit { cost, benefit })
    }

    pub fn len(&self) -> usize {
        self.cost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cost.is_empty()
    }

    pub fn min_cost(&self) -> f64 {
        self.cost.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_cost(&self) -> f64 {
        self.cost.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_benefit(&self) -> f64 {
        self.benefit.iter().copied().fold(0.0, f64::max)
    }
}

pub fn assign_cost_benefit(g: &Graph, cost: Interval, benefit: Interval, seed: u64) -> Result<CostBenefit> {
    cost.validate("cost")?;
    benefit.validate("benefit")?;
    let n = g.node_count();
    let mut cost_rng = rng::stream(seed, 0);
    let mut benefit_rng = rng::stream(seed, 1);
    Ok(CostBenefit {
        cost: (0..n).map(|_| cost_rng.random_range(cost.lo..=cost.hi)).collect(),
        benefit: (0..n).map(|_| benefit_rng.random_range(benefit.lo..=benefit.hi)).collect(),
    })
}
