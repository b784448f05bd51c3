//! Degree Gini indices of random trees grown in discrete time and in
//! poissonized continuous time.
//!
//! Four tree classes are covered: random binary search trees, binary
//! pyramids, uniform caterpillars and preferential-attachment caterpillars.
//! Binary trees are tracked through degree and insertion-slot counts only;
//! caterpillars through per-spine-node attachment counts. The limiting
//! indices of the binary classes come from the principal eigenpair of their
//! two-color urn.

pub mod discrete;
pub mod error;
pub mod experiments;
pub mod gini;
pub mod poisson;
pub mod report;
pub mod rng;
pub mod types;
pub mod urn;

pub use error::{Error, Result};
pub use experiments::{
    analytical_limit, analytical_limits, convergence_sweep, duality_experiment, run_monte_carlo,
    DualityReport, EstimateRecord, GiniVariant, GrownTree, Parallelism, Regime, Scenario, SweepRow,
    TreeClass,
};
pub use gini::{
    binary_gini, class_gini_estimate, degree_gini, limit_gini, sum_abs_pairwise_diffs, wealth_gini,
    GraphSample, LimitProfile,
};
pub use rng::RandomSource;
pub use types::{
    degree_multiset_from_binary, degree_multiset_from_spine, BinaryModel, BinaryTreeState,
    DegreeMultiset, SpineState,
};
pub use urn::{principal_eigenpair, predict_proportions, EigenPrediction, ReplacementMatrix};
