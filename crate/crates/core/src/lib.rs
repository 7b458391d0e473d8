//! Integrated R² dependence coefficient.
//!
//! The population coefficient ν(Y, X) integrates, over thresholds t drawn from
//! the law of Y, the fraction of the variance of 1{Y > t} explained by X. It is
//! 0 exactly when Y is independent of X and 1 exactly when Y is a measurable
//! function of X. This crate provides
//!
//! * the nearest-neighbour estimator for any covariate dimension
//!   ([`nu_general`]), the rank-only estimator for a single covariate
//!   ([`nu_1dim`]) and Chatterjee's ξ ([`xi_coefficient`]) for comparison,
//! * forward variable selection driven by the estimator ([`ford_select`]),
//! * permutation and asymptotic independence tests with Benjamini–Hochberg
//!   adjustment ([`inference`]),
//! * the induced discrepancy on permutations and classical permutation
//!   metrics ([`permdist`]),
//! * population targets and a seeded simulation harness ([`population`],
//!   [`simulation`]).
//!
//! Every randomized step takes an explicit seed; identical inputs and seeds
//! give bitwise-identical results.

pub mod coefficient;
pub mod error;
pub mod ford;
pub mod inference;
pub mod neighbors;
pub mod permdist;
pub mod population;
pub mod ranks;
pub mod rng;
pub mod sample;
pub mod simulation;
pub mod sum;

pub use coefficient::{
    coefficient, nu_1dim, nu_1dim_oracle, nu_1dim_replicated, nu_general, nu_general_oracle,
    nu_general_replicated, weight_comparison, xi_coefficient, xi_replicated, CoefficientResult,
    Method, WeightComparison,
};
pub use error::{Error, Result};
pub use ford::{ford_full_ordering, ford_ordering_prefix, ford_select, SelectionPath, StopReason};
pub use inference::{
    asymptotic_null_params, asymptotic_test, bh_adjust, permutation_test, PermutationTestResult,
    TestMode,
};
pub use neighbors::{build_neighbor_table, NeighborConfig, NeighborTable, SearchStrategy};
pub use permdist::{classical_metric, d_nu, d_nu_symmetric, ClassicalMetric, Permutation};
pub use population::{nu_plug_in_mc, nu_product_uniform, McBudget, PopulationTarget};
pub use ranks::{compute_ranks, RankInfo, WeightTable};
pub use rng::{derive_seed, rng_from_seed, PortableRng, DEFAULT_SEED};
pub use sample::Sample;
pub use simulation::{generate, ExperimentReport, Model, ModelSpec};
