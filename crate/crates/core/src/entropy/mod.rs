//! Separated and spanning sets, their exact and greedy solvers, and
//! entropy estimates built from them.

mod bits;
mod estimate;
mod relation;
mod solver;

pub use estimate::{
    count_chain, epsilon_rates, estimate_entropy, growth_rate, metric_equivalence_check, restriction_entropy_check,
    CountChain, EntropyEstimate, EntropyOptions, EntropyRow, EpsilonRate, GrowthRate, MetricEquivalence,
    RestrictionCheck,
};
pub use relation::{closeness_relation, closeness_sequence, ClosenessRelation};
pub use solver::{
    greedy_dominating, greedy_independent, max_separated, min_spanning, CountResult, Method, SolveMode,
    DEFAULT_NODE_BUDGET,
};
