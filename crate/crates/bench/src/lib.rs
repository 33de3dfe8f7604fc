//! Fixtures shared by the benchmarks.

use deeppm_core::synthetic::two_communities;
use deeppm_core::{
    assign_cost_benefit, CostBenefit, EdgeProbabilities, Graph, Interval, NormalizedOperator, SurrogateParams,
};

pub struct Fixture {
    pub graph: Graph,
    pub probs: EdgeProbabilities,
    pub cb: CostBenefit,
    pub op: NormalizedOperator,
    pub theta: SurrogateParams,
}

/// Two-community graph on `n` nodes with uniform edge probability 0.1 and
/// the default cost and benefit ranges.
pub fn communities(n: usize) -> Fixture {
    let graph = two_communities(n, 8.0 / n as f64, 4, 11).expect("fixture graph");
    let probs = EdgeProbabilities::constant(&graph, 0.1).expect("probabilities");
    let cb = assign_cost_benefit(&graph, Interval::DEFAULT_COST, Interval::DEFAULT_BENEFIT, 3).expect("costs");
    let op = NormalizedOperator::new(&graph);
    let theta = SurrogateParams::init(16, 5).expect("surrogate");
    Fixture {
        graph,
        probs,
        cb,
        op,
        theta,
    }
}
